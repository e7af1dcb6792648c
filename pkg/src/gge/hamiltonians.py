"""Spin-chain Hamiltonians: extended Haldane, anisotropic Haldane,
disordered Heisenberg and the J1-J2 chain.

Each model is described by a declarative ModelSpec and can be materialized
either as a dense matrix (small n) or as a matrix product operator built by
the standard finite-state-machine construction (any n). hbar = 1 and
spin-1/2 operators have eigenvalues +-1/2.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError, ResourceError
from .mps import MatrixProductOperator

DEFAULT_DENSE_CAP = 2**20

MODELS = ("extended_haldane", "anisotropic_haldane", "disordered_heisenberg", "j1j2")

_PARAM_NAMES = {
    "extended_haldane": {"j_aklt"},
    "anisotropic_haldane": {"j", "d", "e"},
    "disordered_heisenberg": {"j", "h", "seed"},
    "j1j2": {"j1", "j2"},
}


def spin_matrices(dim: int):
    """(sx, sy, sz) for a local dimension 2 (spin-1/2) or 3 (spin-1)."""
    if dim not in (2, 3):
        raise ParameterError(f"unsupported local dimension {dim}")
    s = (dim - 1) / 2.0
    m = np.arange(s, -s - 1, -1.0)
    sz = np.diag(m).astype(complex)
    sp_ = np.zeros((dim, dim), dtype=complex)
    for k in range(dim - 1):
        sp_[k, k + 1] = np.sqrt(s * (s + 1) - m[k + 1] * (m[k + 1] + 1))
    sm = sp_.conj().T
    sx = (sp_ + sm) / 2.0
    sy = (sp_ - sm) / 2.0j
    return sx, sy, sz


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of one spin-chain Hamiltonian."""

    model: str
    n: int
    params: dict
    boundary: str = "open"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"unknown model {self.model!r}")
        if self.boundary != "open":
            raise ParameterError("only open boundary conditions are supported")
        if self.n < 2:
            raise ParameterError(f"need n >= 2, got {self.n}")
        expected = _PARAM_NAMES[self.model]
        got = set(self.params)
        if got != expected:
            raise ParameterError(
                f"model {self.model!r} expects params {sorted(expected)}, got {sorted(got)}"
            )

    @property
    def site_dims(self) -> tuple:
        if self.model == "extended_haldane":
            return (2,) + (3,) * (self.n - 2) + (2,)
        if self.model == "anisotropic_haldane":
            return (3,) * self.n
        return (2,) * self.n

    def to_dict(self) -> dict:
        return {"model": self.model, "n": self.n, "params": dict(self.params)}

    @staticmethod
    def from_dict(data: dict) -> "ModelSpec":
        extra = set(data) - {"model", "n", "params"}
        if extra:
            raise ParameterError(f"unknown ModelSpec keys {sorted(extra)}")
        return ModelSpec(model=data["model"], n=int(data["n"]), params=dict(data["params"]))


@dataclass(frozen=True)
class DisorderRealization:
    """Quenched random z-fields; bit-exactly regenerable from the seed."""

    seed: int
    fields: tuple


def draw_disorder_fields(n: int, h: float, seed: int) -> tuple:
    """Box-uniform fields in [-h, h], one PCG64 stream per site.

    Each site j draws from Generator(PCG64(SeedSequence([seed, j]))), so
    realizations are platform-independent and sites can be generated in
    parallel or in any order.
    """
    fields = []
    for j in range(n):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), j])))
        fields.append(float(rng.uniform(-h, h)))
    return tuple(fields)


def extended_haldane(n: int, j_aklt: float) -> ModelSpec:
    """Spin-1 bilinear-biquadratic chain with spin-1/2 edge sites.

    H = sum_j S_j . S_{j+1} + (j_aklt / 3) sum_j (S_j . S_{j+1})^2 on open
    boundaries. The first and last sites carry spin-1/2 operators (lifting
    the fourfold edge degeneracy); the biquadratic term acts only on
    spin-1--spin-1 bonds, the edge bonds are purely bilinear. At
    j_aklt = 1 this is the AKLT Hamiltonian.
    """
    if n < 3:
        raise ParameterError(f"extended_haldane needs n >= 3, got {n}")
    return ModelSpec("extended_haldane", n, {"j_aklt": float(j_aklt)})


def anisotropic_haldane(n: int, j: float, d: float, e: float) -> ModelSpec:
    """Spin-1 chain J sum S.S + D sum (S^z)^2 + E sum (S^x)^2 - (S^y)^2."""
    return ModelSpec("anisotropic_haldane", n, {"j": float(j), "d": float(d), "e": float(e)})


def disordered_heisenberg(n: int, j: float, h: float, seed: int):
    """Spin-1/2 Heisenberg chain with quenched random z-fields in [-h, h].

    Returns (spec, realization); the realization's fields are a pure
    function of (n, h, seed).
    """
    if h < 0:
        raise ParameterError(f"disorder strength h must be >= 0, got {h}")
    spec = ModelSpec("disordered_heisenberg", n, {"j": float(j), "h": float(h), "seed": int(seed)})
    fields = draw_disorder_fields(n, float(h), int(seed))
    return spec, DisorderRealization(seed=int(seed), fields=fields)


def j1j2(n: int, j1: float, j2: float) -> ModelSpec:
    """Spin-1/2 chain with nearest and next-nearest neighbor Heisenberg terms."""
    if n < 3:
        raise ParameterError(f"j1j2 needs n >= 3, got {n}")
    return ModelSpec("j1j2", n, {"j1": float(j1), "j2": float(j2)})


def _terms(spec: ModelSpec):
    """Hamiltonian as a list of (coeff, {site: local matrix}) products."""
    dims = spec.site_dims
    n = spec.n
    ops = {d: spin_matrices(d) for d in set(dims)}
    terms = []

    def add_exchange(i, k, coeff):
        for a in range(3):
            terms.append((coeff, {i: ops[dims[i]][a], k: ops[dims[k]][a]}))

    if spec.model == "extended_haldane":
        j_aklt = spec.params["j_aklt"]
        for i in range(n - 1):
            add_exchange(i, i + 1, 1.0)
            if dims[i] == 3 and dims[i + 1] == 3 and j_aklt != 0.0:
                for a in range(3):
                    for b in range(3):
                        oa = ops[3][a] @ ops[3][b]
                        terms.append((j_aklt / 3.0, {i: oa, i + 1: oa}))
    elif spec.model == "anisotropic_haldane":
        j, d, e = spec.params["j"], spec.params["d"], spec.params["e"]
        sx, sy, sz = ops[3]
        for i in range(n - 1):
            add_exchange(i, i + 1, j)
        onsite = d * (sz @ sz) + e * (sx @ sx - sy @ sy)
        for i in range(n):
            terms.append((1.0, {i: onsite}))
    elif spec.model == "disordered_heisenberg":
        j = spec.params["j"]
        fields = draw_disorder_fields(n, spec.params["h"], spec.params["seed"])
        sz = ops[2][2]
        for i in range(n - 1):
            add_exchange(i, i + 1, j)
        for i in range(n):
            if fields[i] != 0.0:
                terms.append((fields[i], {i: sz}))
    elif spec.model == "j1j2":
        j1_, j2_ = spec.params["j1"], spec.params["j2"]
        for i in range(n - 1):
            add_exchange(i, i + 1, j1_)
        for i in range(n - 2):
            if j2_ != 0.0:
                add_exchange(i, i + 2, j2_)
    return terms


def pair_couplings(spec: ModelSpec):
    """(pairs, fields) for spin-1/2 isotropic-exchange models.

    pairs is a list of (i, j, coeff) Heisenberg couplings and fields a list
    of per-site z-field strengths. Used by sector-resolved solvers; only
    defined for models that conserve total S^z.
    """
    n = spec.n
    if spec.model == "disordered_heisenberg":
        j = spec.params["j"]
        pairs = [(i, i + 1, j) for i in range(n - 1)]
        fields = list(draw_disorder_fields(n, spec.params["h"], spec.params["seed"]))
        return pairs, fields
    if spec.model == "j1j2":
        j1_, j2_ = spec.params["j1"], spec.params["j2"]
        pairs = [(i, i + 1, j1_) for i in range(n - 1)]
        pairs += [(i, i + 2, j2_) for i in range(n - 2)]
        return pairs, [0.0] * n
    raise ParameterError(f"model {spec.model!r} has no spin-1/2 pair-coupling form")


def to_dense_matrix(spec: ModelSpec, max_states: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Hermitian matrix in the tensor-product basis (same site order as
    DenseState amplitudes)."""
    dims = spec.site_dims
    total = int(np.prod(dims, dtype=np.int64))
    if total > max_states:
        raise ResourceError(f"dense matrix needs {total} basis states, cap is {max_states}")
    acc = sp.csr_matrix((total, total), dtype=complex)
    for coeff, sites in _terms(spec):
        op = sp.identity(1, dtype=complex, format="csr")
        for i, d in enumerate(dims):
            local = sites.get(i)
            if local is None:
                local = sp.identity(d, dtype=complex, format="csr")
            else:
                local = sp.csr_matrix(local)
            op = sp.kron(op, local, format="csr")
        acc = acc + coeff * op
    return acc.toarray()


def _assemble_mpo(n, dims, width, entries, onsite=None) -> MatrixProductOperator:
    """Build MPO site tensors from per-site {(row, col): matrix} tables.

    ``entries`` maps site index -> dict of automaton transitions. Row 0 is
    the initial state and row width-1 the final state. The first site keeps
    only row 0 and the last only the final column.
    """
    tensors = []
    for i in range(n):
        d = dims[i]
        w = np.zeros((width, width, d, d), dtype=complex)
        for (row, col), mat in entries[i].items():
            w[row, col] += mat
        if onsite is not None and onsite[i] is not None:
            w[0, width - 1] += onsite[i]
        w[0, 0] = np.eye(d)
        w[width - 1, width - 1] = np.eye(d)
        if i == 0:
            w = w[0:1, :]
        if i == n - 1:
            w = w[:, width - 1:width]
        tensors.append(w.transpose(0, 2, 3, 1))  # (wl, dout, din, wr)
    return MatrixProductOperator(tuple(tensors))


def to_mpo(spec: ModelSpec) -> MatrixProductOperator:
    """Finite-state-machine MPO; contracts to to_dense_matrix for small n."""
    dims = spec.site_dims
    n = spec.n
    ops = {d: spin_matrices(d) for d in set(dims)}

    if spec.model == "j1j2":
        j1_, j2_ = spec.params["j1"], spec.params["j2"]
        width = 8  # 0 init, 1-3 distance-1 pending, 4-6 pass-through, 7 final
        entries = []
        for i in range(n):
            s = ops[2]
            table = {}
            for a in range(3):
                table[(0, 1 + a)] = s[a]
                table[(1 + a, 7)] = j1_ * s[a]
                table[(1 + a, 4 + a)] = np.eye(2, dtype=complex)
                table[(4 + a, 7)] = j2_ * s[a]
            entries.append(table)
        return _assemble_mpo(n, dims, width, entries)

    if spec.model == "extended_haldane":
        j_aklt = spec.params["j_aklt"]
        biquad = j_aklt != 0.0
        width = 14 if biquad else 5
        final = width - 1
        entries = []
        for i in range(n):
            s = ops[dims[i]]
            table = {}
            for a in range(3):
                if i < n - 1:
                    table[(0, 1 + a)] = s[a]
                if i > 0:
                    table[(1 + a, final)] = s[a]
            if biquad:
                for a in range(3):
                    for b in range(3):
                        prod = s[a] @ s[b]
                        # biquadratic channels open only on spin-1--spin-1 bonds
                        if i < n - 1 and dims[i] == 3 and dims[i + 1] == 3:
                            table[(0, 4 + 3 * a + b)] = (j_aklt / 3.0) * prod
                        if i > 0 and dims[i] == 3 and dims[i - 1] == 3:
                            table[(4 + 3 * a + b, final)] = prod
            entries.append(table)
        return _assemble_mpo(n, dims, width, entries)

    # nearest-neighbor exchange models: width-5 automaton
    width = 5
    entries = []
    onsite = [None] * n
    if spec.model == "anisotropic_haldane":
        j, d_, e_ = spec.params["j"], spec.params["d"], spec.params["e"]
        sx, sy, sz = ops[3]
        site_onsite = d_ * (sz @ sz) + e_ * (sx @ sx - sy @ sy)
        bond_coeff = j
        onsite = [site_onsite] * n
    else:  # disordered_heisenberg
        bond_coeff = spec.params["j"]
        sz = ops[2][2]
        fields = draw_disorder_fields(n, spec.params["h"], spec.params["seed"])
        onsite = [fields[i] * sz for i in range(n)]
    for i in range(n):
        s = ops[dims[i]]
        table = {}
        for a in range(3):
            if i < n - 1:
                table[(0, 1 + a)] = bond_coeff * s[a]
            if i > 0:
                table[(1 + a, 4)] = s[a]
        entries.append(table)
    return _assemble_mpo(n, dims, width, entries, onsite)
