"""Ground states via two-site DMRG, eigenstates via exact diagonalization,
and the exact valence-bond-solid MPS of the AKLT chain.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ParameterError
from .hamiltonians import ModelSpec, pair_couplings
from .mps import (
    DenseState,
    MatrixProductOperator,
    MatrixProductState,
    canonicalize,
    expectation,
    normalize,
)
from .tensor_ops import svd


@dataclass(frozen=True)
class DmrgConfig:
    """Two-site DMRG settings.

    ``max_bond`` is the solver bond dimension, deliberately distinct from
    the measurement chi: states are converged at a generous bond and only
    then truncated for measurement.
    """

    max_bond: int = 64
    sweeps: int = 12
    energy_tol: float = 1e-9
    truncation_tol: float = 1e-10
    inner_tol: float = 1e-9  # eigsh tolerance; 0 = machine precision
    init_seed: int = 1234

    def __post_init__(self):
        if self.max_bond < 1:
            raise ParameterError("max_bond must be >= 1")
        if self.sweeps < 1:
            raise ParameterError("sweeps must be >= 1")
        if self.energy_tol <= 0 or self.truncation_tol <= 0:
            raise ParameterError("tolerances must be > 0")

    def to_dict(self) -> dict:
        return {
            "max_bond": self.max_bond,
            "sweeps": self.sweeps,
            "energy_tol": self.energy_tol,
            "truncation_tol": self.truncation_tol,
            "inner_tol": self.inner_tol,
            "init_seed": self.init_seed,
        }

    @staticmethod
    def from_dict(data: dict) -> "DmrgConfig":
        extra = set(data) - {"max_bond", "sweeps", "energy_tol", "truncation_tol",
                             "inner_tol", "init_seed"}
        if extra:
            raise ParameterError(f"unknown DmrgConfig keys {sorted(extra)}")
        return DmrgConfig(**data)


@dataclass(frozen=True)
class DmrgResult:
    energy: float
    state: MatrixProductState
    sweep_energies: tuple
    converged: bool


@dataclass(frozen=True)
class EigenSolution:
    """Full spectrum with relative energies mu = (E - Emin)/(Emax - Emin)."""

    energies: np.ndarray
    states: list
    mu: np.ndarray


def _random_mps(phys_dims, bond: int, seed: int) -> MatrixProductState:
    rng = np.random.default_rng(seed)
    n = len(phys_dims)
    left_cap = [1]
    for d in phys_dims[:-1]:
        left_cap.append(min(left_cap[-1] * d, bond))
    right_cap = [1]
    for d in reversed(phys_dims[1:]):
        right_cap.append(min(right_cap[-1] * d, bond))
    right_cap.reverse()
    bonds = [1] + [min(left_cap[k + 1], right_cap[k]) for k in range(n - 1)] + [1]
    tensors = []
    for i, d in enumerate(phys_dims):
        l, r = bonds[i], bonds[i + 1]
        t = rng.normal(size=(l, d, r)) + 1j * rng.normal(size=(l, d, r))
        tensors.append(t)
    m = MatrixProductState(tuple(tensors))
    return normalize(canonicalize(m, 0))


def _grow_left_env(env, w, t):
    """Environment axes (bra bond, mpo bond, ket bond)."""
    tmp = np.tensordot(env, t.conj(), axes=([0], [0]))  # (w, b, dout, a')
    tmp = np.tensordot(tmp, w, axes=([0, 2], [0, 1]))  # (b, a', din, w')
    return np.tensordot(tmp, t, axes=([0, 2], [0, 1]))  # (a', w', b')


def _grow_right_env(env, w, t):
    tmp = np.tensordot(t.conj(), env, axes=([2], [0]))  # (a, dout, w, b)
    tmp = np.tensordot(tmp, w, axes=([1, 2], [1, 3]))  # (a, b, w', din)
    return np.tensordot(tmp, t, axes=([1, 3], [2, 1]))  # (a, w', b')


def _solve_local(left, w1, w2, right, theta0, inner_tol):
    """Lowest eigenpair of the two-site effective Hamiltonian.

    Lanczos-style iteration (scipy eigsh) on a matrix-free operator, warm
    started from the current two-site tensor; dense eigh for tiny blocks.
    """
    l, d1 = left.shape[0], w1.shape[1]
    d2, r = w2.shape[1], right.shape[0]
    dim = l * d1 * d2 * r

    def matvec(x):
        th = x.reshape(l, d1, d2, r)
        tmp = np.tensordot(left, th, axes=([2], [0]))  # (a, w, d1, d2, r)
        tmp = np.tensordot(tmp, w1, axes=([1, 2], [0, 2]))  # (a, d2, r, o1, wm)
        tmp = np.tensordot(tmp, w2, axes=([4, 1], [0, 2]))  # (a, r, o1, o2, wr)
        tmp = np.tensordot(tmp, right, axes=([4, 1], [1, 2]))  # (a, o1, o2, ar)
        return tmp.reshape(-1)

    if dim <= 256:
        mat = np.empty((dim, dim), dtype=complex)
        eye = np.eye(dim, dtype=complex)
        for k in range(dim):
            mat[:, k] = matvec(eye[:, k])
        vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
        return float(vals[0]), vecs[:, 0]

    op = spla.LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    v0 = theta0.reshape(-1)
    # a handful of restarts per local solve is enough: the outer sweeps drive
    # global convergence, so fully converging each site-pair wastes matvecs
    try:
        vals, vecs = spla.eigsh(op, k=1, which="SA", v0=v0, tol=inner_tol,
                                ncv=8, maxiter=4)
    except spla.ArpackNoConvergence as exc:
        if exc.eigenvalues.size:
            vals, vecs = exc.eigenvalues, exc.eigenvectors
        else:
            vals, vecs = spla.eigsh(op, k=1, which="SA", v0=v0, tol=inner_tol,
                                    maxiter=max(200, 10 * dim))
    return float(vals[0]), vecs[:, 0]


def _split_theta(theta, l, d1, d2, r, max_bond, truncation_tol):
    """Truncating SVD of the optimized two-site tensor."""
    res = svd(theta.reshape(l * d1, d2 * r), max_keep=max_bond)
    s = res.s
    total = float(np.sum(s**2)) + res.discarded_weight
    if s.size > 1 and total > 0.0:
        tail = np.cumsum((s**2)[::-1])[::-1] / total
        keep = s.size
        # drop trailing values whose combined weight is below tolerance
        for k in range(1, s.size):
            if tail[k] <= truncation_tol:
                keep = k
                break
        s = s[:keep]
    keep = s.size
    u = res.u[:, :keep]
    vdag = res.vdag[:keep, :]
    return u.reshape(l, d1, keep), s, vdag.reshape(keep, d2, r)


def dmrg_ground_state(op: MatrixProductOperator, cfg: DmrgConfig | None = None,
                      initial: MatrixProductState | None = None) -> DmrgResult:
    """Variational ground-state search with two adjacent sites optimized at
    a time. Returns the best estimate flagged not-converged if the energy
    change per sweep never drops below ``energy_tol``."""
    if cfg is None:
        cfg = DmrgConfig()
    dims = op.phys_dims
    n = op.n_sites
    if n < 2:
        raise ParameterError("DMRG needs at least two sites")
    if initial is None:
        state = _random_mps(dims, min(8, cfg.max_bond), cfg.init_seed)
    else:
        state = normalize(canonicalize(initial, 0))
    tensors = list(state.sites)

    right_envs = [None] * (n + 1)
    right_envs[n] = np.ones((1, 1, 1), dtype=complex)
    for i in range(n - 1, 1, -1):
        right_envs[i] = _grow_right_env(right_envs[i + 1], op.sites[i], tensors[i])
    left_envs = [None] * n
    left_envs[0] = np.ones((1, 1, 1), dtype=complex)

    sweep_energies = []
    converged = False
    prev_energy = np.inf
    for sweep in range(cfg.sweeps):
        # ramp the bond dimension up over the first sweeps: early sweeps only
        # rough out the state, so solving them at full bond wastes time
        sweep_bond = min(cfg.max_bond, max(8, 8 * 4 ** sweep))
        energy = np.inf
        # left-to-right
        for i in range(n - 1):
            theta0 = np.tensordot(tensors[i], tensors[i + 1], axes=([2], [0]))
            energy, vec = _solve_local(left_envs[i], op.sites[i], op.sites[i + 1],
                                       right_envs[i + 2], theta0, cfg.inner_tol)
            l, d1, d2, r = theta0.shape
            u, s, v = _split_theta(vec.reshape(l, d1, d2, r), l, d1, d2, r,
                                   sweep_bond, cfg.truncation_tol)
            tensors[i] = u
            carry = (s / np.linalg.norm(s))[:, None, None] * v
            tensors[i + 1] = carry
            left_envs[i + 1] = _grow_left_env(left_envs[i], op.sites[i], tensors[i])
        # right-to-left
        for i in range(n - 2, -1, -1):
            theta0 = np.tensordot(tensors[i], tensors[i + 1], axes=([2], [0]))
            energy, vec = _solve_local(left_envs[i], op.sites[i], op.sites[i + 1],
                                       right_envs[i + 2], theta0, cfg.inner_tol)
            l, d1, d2, r = theta0.shape
            u, s, v = _split_theta(vec.reshape(l, d1, d2, r), l, d1, d2, r,
                                   sweep_bond, cfg.truncation_tol)
            tensors[i + 1] = v
            carry = u * (s / np.linalg.norm(s))[None, None, :]
            tensors[i] = carry
            right_envs[i + 1] = _grow_right_env(right_envs[i + 2], op.sites[i + 1],
                                                tensors[i + 1])
        sweep_energies.append(energy)
        if sweep_bond >= cfg.max_bond and abs(prev_energy - energy) < cfg.energy_tol:
            converged = True
            break
        prev_energy = energy

    final = MatrixProductState(tuple(tensors), max_bond=cfg.max_bond,
                               canonical_center=0)
    final = normalize(canonicalize(final, 0))
    final_energy = float(expectation(op, final).real)
    return DmrgResult(energy=final_energy, state=final,
                      sweep_energies=tuple(sweep_energies), converged=converged)


def exact_spectrum(h: np.ndarray, site_dims=None) -> EigenSolution:
    """Full eigendecomposition of a Hermitian matrix.

    ``site_dims`` fixes the chain structure of the returned DenseStates;
    defaults to a single site of the full dimension.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {h.shape}")
    hnorm = np.linalg.norm(h)
    if np.linalg.norm(h - h.conj().T) > 1e-10 * max(hnorm, 1.0):
        raise ParameterError("input matrix is not Hermitian within 1e-10")
    if site_dims is None:
        site_dims = (h.shape[0],)
    energies, vecs = np.linalg.eigh(h)
    states = [DenseState(site_dims, vecs[:, k]) for k in range(len(energies))]
    return EigenSolution(energies=energies, states=states, mu=_mu(energies))


def _mu(energies: np.ndarray) -> np.ndarray:
    span = energies[-1] - energies[0]
    if span == 0.0:
        return np.zeros_like(energies)
    return (energies - energies[0]) / span


def mid_spectrum(sol: EigenSolution, k: int) -> list:
    """The k states with mu closest to 1/2, ties toward lower energy,
    returned in order of increasing mu."""
    total = len(sol.energies)
    if not 1 <= k <= total:
        raise ParameterError(f"k must be in [1, {total}], got {k}")
    order = sorted(range(total), key=lambda i: (abs(sol.mu[i] - 0.5), sol.energies[i]))
    chosen = sorted(order[:k], key=lambda i: (sol.mu[i], sol.energies[i]))
    return [sol.states[i] for i in chosen]


def sector_spectrum(spec: ModelSpec):
    """Spectrum of a total-S^z-conserving spin-1/2 model, block by block.

    Returns (energies ascending, mu, blocks) where blocks is a list of
    (basis_indices, eigenvalues, eigenvectors, positions) per magnetization
    sector; ``positions`` maps sector columns into the global ascending
    order. Equivalent to exact_spectrum of the dense matrix but far cheaper,
    and eigenstates can be materialized selectively.
    """
    pairs, fields = pair_couplings(spec)
    n = spec.n
    blocks = []
    all_energies = []
    tags = []
    for ones in range(n + 1):
        basis = [idx for idx in range(1 << n) if bin(idx).count("1") == ones]
        pos = {idx: p for p, idx in enumerate(basis)}
        dim = len(basis)
        block = np.zeros((dim, dim))
        for p, idx in enumerate(basis):
            bits = [(idx >> (n - 1 - j)) & 1 for j in range(n)]
            sz = [0.5 - b for b in bits]
            diag = sum(c * sz[i] * sz[j] for i, j, c in pairs)
            diag += sum(f * z for f, z in zip(fields, sz))
            block[p, p] = diag
            for i, j, c in pairs:
                if bits[i] != bits[j]:
                    flipped = idx ^ (1 << (n - 1 - i)) ^ (1 << (n - 1 - j))
                    block[p, pos[flipped]] += 0.5 * c
        vals, vecs = np.linalg.eigh(block)
        blocks.append([np.array(basis), vals, vecs, None])
        all_energies.extend(vals)
        tags.extend((len(blocks) - 1, c) for c in range(dim))
    order = np.argsort(np.asarray(all_energies), kind="stable")
    energies = np.asarray(all_energies)[order]
    for b, blk in enumerate(blocks):
        blk[3] = {}
    for rank, t in enumerate(order):
        b, c = tags[t]
        blocks[b][3][c] = rank
    return energies, _mu(energies), blocks


def sector_mid_spectrum(spec: ModelSpec, k: int) -> list:
    """Mid-spectrum eigenstates via the S^z-sector decomposition.

    Returns a list of (mu, energy, DenseState), ordered by mu, using the
    same selection rule as mid_spectrum.
    """
    energies, mu, blocks = sector_spectrum(spec)
    total = len(energies)
    if not 1 <= k <= total:
        raise ParameterError(f"k must be in [1, {total}], got {k}")
    order = sorted(range(total), key=lambda i: (abs(mu[i] - 0.5), energies[i]))
    chosen = set(order[:k])
    dims = spec.site_dims
    dim_total = 1 << spec.n
    out = []
    for basis, vals, vecs, rank_of in blocks:
        for c, rank in rank_of.items():
            if rank in chosen:
                amps = np.zeros(dim_total, dtype=complex)
                amps[basis] = vecs[:, c]
                out.append((float(mu[rank]), float(energies[rank]), DenseState(dims, amps)))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def aklt_exact_mps(n: int) -> MatrixProductState:
    """Exact bond-2 valence-bond-solid ground state of the AKLT chain with
    physical spin-1/2 edge sites.

    Bulk tensors are sqrt(2/3) sigma+, -(1/sqrt 3) sigma_z, -sqrt(2/3)
    sigma- for m = +1, 0, -1 (the sign convention in which the virtual
    bonds are singlets); the left edge tensor is the singlet matrix and the
    right edge the identity, making the edge physical spins the terminal
    virtual spins of the solid.
    """
    if n < 3:
        raise ParameterError(f"need n >= 3, got {n}")
    a_plus = np.sqrt(2.0 / 3.0) * np.array([[0, 1], [0, 0]], dtype=complex)
    a_zero = -(1.0 / np.sqrt(3.0)) * np.array([[1, 0], [0, -1]], dtype=complex)
    a_minus = -np.sqrt(2.0 / 3.0) * np.array([[0, 0], [1, 0]], dtype=complex)
    bulk = np.stack([a_plus, a_zero, a_minus], axis=1)  # (s, m, s')
    left = np.array([[0, 1], [-1, 0]], dtype=complex).reshape(1, 2, 2)
    right = np.eye(2, dtype=complex).reshape(2, 2, 1)
    sites = (left,) + (bulk,) * (n - 2) + (right,)
    m = MatrixProductState(sites, max_bond=2)
    return normalize(canonicalize(m, 0))
