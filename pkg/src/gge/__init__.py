"""Tensor-network toolkit for the entanglement-complexity generalization of
the geometric entanglement: E_chi = 1 - |<psi | MPS[psi, chi]>|^2."""

__version__ = "0.1.0"

from .errors import NumericalError, ParameterError, ResourceError, ShapeError
from .mps import (
    DenseState,
    MatrixProductOperator,
    MatrixProductState,
    apply_mpo,
    canonicalize,
    compress,
    expectation,
    normalize,
    overlap,
    to_dense,
    truncate,
)
from .measures import (
    GEResult,
    RelativeGEResult,
    ge_profile,
    geometric_entanglement,
    relative_ge,
)
from .hamiltonians import (
    DisorderRealization,
    ModelSpec,
    anisotropic_haldane,
    disordered_heisenberg,
    draw_disorder_fields,
    extended_haldane,
    j1j2,
    spin_matrices,
    to_dense_matrix,
    to_mpo,
)
from .solvers import (
    DmrgConfig,
    DmrgResult,
    EigenSolution,
    aklt_exact_mps,
    dmrg_ground_state,
    exact_spectrum,
    mid_spectrum,
    sector_mid_spectrum,
)
from .harness import ExperimentConfig, load_config, run_experiment

__all__ = [
    "__version__",
    "ShapeError", "ParameterError", "ResourceError", "NumericalError",
    "DenseState", "MatrixProductState", "MatrixProductOperator",
    "compress", "truncate", "to_dense", "overlap", "canonicalize",
    "normalize", "apply_mpo", "expectation",
    "GEResult", "RelativeGEResult", "geometric_entanglement",
    "relative_ge", "ge_profile",
    "ModelSpec", "DisorderRealization", "spin_matrices",
    "extended_haldane", "anisotropic_haldane", "disordered_heisenberg",
    "j1j2", "draw_disorder_fields", "to_dense_matrix", "to_mpo",
    "DmrgConfig", "DmrgResult", "EigenSolution", "dmrg_ground_state",
    "exact_spectrum", "mid_spectrum", "sector_mid_spectrum", "aklt_exact_mps",
    "ExperimentConfig", "load_config", "run_experiment",
]
