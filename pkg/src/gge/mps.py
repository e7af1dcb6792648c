"""Matrix product states: fixed-bond compression, canonical forms, overlaps.

Site tensors are rank-3 arrays with axes (left bond, physical, right bond);
boundary bonds have extent 1 (open chains only). MPO site tensors are rank-4
with axes (left bond, physical out, physical in, right bond). Mixed local
dimensions are supported throughout.

All values are treated as immutable; operations return new objects.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ResourceError, ShapeError
from .tensor_ops import svd

# Guard for densification of an MPS (number of basis states).
DEFAULT_DENSE_CAP = 2**24


@dataclass(frozen=True)
class DenseState:
    """Full state vector over a chain of (possibly mixed-dimension) sites."""

    site_dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.site_dims)
        object.__setattr__(self, "site_dims", dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims, dtype=np.int64)):
            raise ShapeError(
                f"amplitude count {amps.size} != product of site dims {dims}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "DenseState":
        nrm = self.norm
        if nrm == 0.0:
            raise ParameterError("cannot normalize the zero state")
        return DenseState(self.site_dims, self.amplitudes / nrm)


@dataclass(frozen=True)
class MatrixProductState:
    """Open-boundary MPS; ``max_bond`` records the compression chi, if any."""

    sites: tuple
    max_bond: int | None = None
    canonical_center: int | None = None

    def __post_init__(self):
        sites = tuple(np.asarray(t, dtype=complex) for t in self.sites)
        object.__setattr__(self, "sites", sites)
        if not sites:
            raise ShapeError("MPS needs at least one site")
        if sites[0].shape[0] != 1 or sites[-1].shape[2] != 1:
            raise ShapeError("boundary bonds must have extent 1")
        for k in range(len(sites) - 1):
            if sites[k].shape[2] != sites[k + 1].shape[0]:
                raise ShapeError(
                    f"bond mismatch between sites {k} and {k + 1}: "
                    f"{sites[k].shape[2]} vs {sites[k + 1].shape[0]}"
                )

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def phys_dims(self) -> tuple:
        return tuple(t.shape[1] for t in self.sites)

    @property
    def bond_dims(self) -> tuple:
        """Internal bond extents (length n_sites - 1)."""
        return tuple(t.shape[2] for t in self.sites[:-1])

    @property
    def norm(self) -> float:
        return float(np.sqrt(abs(overlap(self, self).real)))


@dataclass(frozen=True)
class MatrixProductOperator:
    """Chain of rank-4 tensors (left bond, phys out, phys in, right bond)."""

    sites: tuple

    def __post_init__(self):
        sites = tuple(np.asarray(t, dtype=complex) for t in self.sites)
        object.__setattr__(self, "sites", sites)
        if sites[0].shape[0] != 1 or sites[-1].shape[3] != 1:
            raise ShapeError("boundary MPO bonds must have extent 1")
        for k in range(len(sites) - 1):
            if sites[k].shape[3] != sites[k + 1].shape[0]:
                raise ShapeError(f"MPO bond mismatch at sites {k}, {k + 1}")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def phys_dims(self) -> tuple:
        return tuple(t.shape[1] for t in self.sites)

    @property
    def bond_dims(self) -> tuple:
        return tuple(t.shape[3] for t in self.sites[:-1])


def compress(state: DenseState, chi: int, refine_sweeps: int = 0) -> MatrixProductState:
    """Compress a dense state into an MPS with all bonds <= chi.

    Left-to-right chain of truncating SVDs: at each cut the chi largest
    singular values are kept and the singular matrix is absorbed into the
    right remainder. The result is renormalized to unit norm.

    ``refine_sweeps`` optionally runs alternating local overlap-maximization
    sweeps afterwards; the default 0 reproduces the plain truncation chain.
    """
    if chi < 1:
        raise ParameterError(f"chi must be >= 1, got {chi}")
    dims = state.site_dims
    n = len(dims)
    remainder = state.amplitudes.reshape(1, -1)
    left_dim = 1
    tensors = []
    for k in range(n - 1):
        d = dims[k]
        res = svd(remainder.reshape(left_dim * d, -1), max_keep=chi)
        keep = res.s.size
        tensors.append(res.u.reshape(left_dim, d, keep))
        remainder = res.s[:, None] * res.vdag
        left_dim = keep
    last = remainder.reshape(left_dim, dims[-1], 1)
    nrm = np.linalg.norm(last)
    if nrm == 0.0:
        raise ParameterError("cannot compress the zero state")
    tensors.append(last / nrm)
    mps = MatrixProductState(tuple(tensors), max_bond=chi, canonical_center=n - 1)
    if refine_sweeps > 0:
        mps = _refine_against_dense(mps, state, refine_sweeps)
    return mps


def to_dense(m: MatrixProductState, max_states: int = DEFAULT_DENSE_CAP) -> DenseState:
    """Contract the full site-tensor chain into a DenseState."""
    dims = m.phys_dims
    total = int(np.prod(dims, dtype=np.int64))
    if total > max_states:
        raise ResourceError(
            f"densification needs {total} basis states, cap is {max_states}"
        )
    v = m.sites[0][0]  # (d0, r0)
    v = v.reshape(-1, v.shape[-1])
    for t in m.sites[1:]:
        v = np.tensordot(v, t, axes=([1], [0]))  # (D, d, r)
        v = v.reshape(-1, t.shape[2])
    return DenseState(dims, v[:, 0])


def overlap(a, b) -> complex:
    """Inner product <a|b> (conjugation on a) for MPS or dense states.

    MPS-MPS overlaps are computed by zip-up contraction without
    densification.
    """
    a_dims = a.phys_dims if isinstance(a, MatrixProductState) else a.site_dims
    b_dims = b.phys_dims if isinstance(b, MatrixProductState) else b.site_dims
    if tuple(a_dims) != tuple(b_dims):
        raise ShapeError(f"site dimensions differ: {a_dims} vs {b_dims}")
    if isinstance(a, DenseState) and isinstance(b, DenseState):
        return complex(np.vdot(a.amplitudes, b.amplitudes))
    if isinstance(a, MatrixProductState) and isinstance(b, MatrixProductState):
        env = np.ones((1, 1), dtype=complex)
        for ta, tb in zip(a.sites, b.sites):
            tmp = np.tensordot(env, ta.conj(), axes=([0], [0]))  # (beta, d, a')
            env = np.tensordot(tmp, tb, axes=([0, 1], [0, 1]))  # (a', b')
        return complex(env[0, 0])
    if isinstance(a, DenseState):
        return _dense_mps_overlap(a, b)
    return complex(np.conj(_dense_mps_overlap(b, a)))


def _dense_mps_overlap(psi: DenseState, m: MatrixProductState) -> complex:
    """<psi|m> by absorbing MPS tensors one site at a time."""
    env = psi.amplitudes.conj().reshape(1, -1)  # (bond, remaining phys)
    for t in m.sites:
        l, d, r = t.shape
        env = env.reshape(l, d, -1)
        env = np.tensordot(env, t, axes=([0, 1], [0, 1]))  # (rest, r)
        env = env.T  # (r, rest)
    return complex(env.reshape(()))


def canonicalize(m: MatrixProductState, center: int) -> MatrixProductState:
    """Gauge the MPS so sites < center are left- and > center right-orthogonal."""
    n = m.n_sites
    if not 0 <= center < n:
        raise ParameterError(f"center {center} out of range for {n} sites")
    tensors = [t.copy() for t in m.sites]
    for i in range(center):
        l, d, r = tensors[i].shape
        q, rm = np.linalg.qr(tensors[i].reshape(l * d, r))
        tensors[i] = q.reshape(l, d, q.shape[1])
        tensors[i + 1] = np.tensordot(rm, tensors[i + 1], axes=([1], [0]))
    for i in range(n - 1, center, -1):
        l, d, r = tensors[i].shape
        # t = L @ Q with Q right-orthogonal, via QR of the conjugate transpose
        q, rm = np.linalg.qr(tensors[i].reshape(l, d * r).conj().T)
        tensors[i] = q.conj().T.reshape(q.shape[1], d, r)
        tensors[i - 1] = np.tensordot(tensors[i - 1], rm.conj().T, axes=([2], [0]))
    return MatrixProductState(tuple(tensors), max_bond=m.max_bond, canonical_center=center)


def normalize(m: MatrixProductState) -> MatrixProductState:
    """Scale to unit norm (applied to the canonical-center tensor)."""
    center = m.canonical_center
    if center is None:
        m = canonicalize(m, 0)
        center = 0
    nrm = np.linalg.norm(m.sites[center])
    if nrm == 0.0:
        raise ParameterError("cannot normalize the zero MPS")
    tensors = list(m.sites)
    tensors[center] = tensors[center] / nrm
    return MatrixProductState(tuple(tensors), max_bond=m.max_bond, canonical_center=center)


def truncate(m: MatrixProductState, chi: int) -> MatrixProductState:
    """Truncate all bonds to chi by a sweep of SVDs from canonical form.

    The input is first brought to right-canonical form so each cut's
    singular values are the Schmidt values of the full state; the result is
    renormalized.
    """
    if chi < 1:
        raise ParameterError(f"chi must be >= 1, got {chi}")
    n = m.n_sites
    work = canonicalize(m, 0)
    tensors = list(work.sites)
    for i in range(n - 1):
        l, d, r = tensors[i].shape
        res = svd(tensors[i].reshape(l * d, r), max_keep=chi)
        keep = res.s.size
        tensors[i] = res.u.reshape(l, d, keep)
        carry = res.s[:, None] * res.vdag
        tensors[i + 1] = np.tensordot(carry, tensors[i + 1], axes=([1], [0]))
    nrm = np.linalg.norm(tensors[-1])
    tensors[-1] = tensors[-1] / nrm
    return MatrixProductState(tuple(tensors), max_bond=chi, canonical_center=n - 1)


def apply_mpo(op: MatrixProductOperator, m: MatrixProductState) -> MatrixProductState:
    """Apply an MPO without truncation; bond dimensions multiply."""
    if op.n_sites != m.n_sites:
        raise ShapeError("site count mismatch between MPO and MPS")
    tensors = []
    for w, t in zip(op.sites, m.sites):
        if w.shape[2] != t.shape[1]:
            raise ShapeError(
                f"physical dimension mismatch: MPO {w.shape[2]} vs MPS {t.shape[1]}"
            )
        new = np.tensordot(w, t, axes=([2], [1]))  # (wl, dout, wr, l, r)
        new = new.transpose(3, 0, 1, 4, 2)
        l, wl, dout, r, wr = new.shape
        tensors.append(new.reshape(l * wl, dout, r * wr))
    return MatrixProductState(tuple(tensors))


def expectation(op: MatrixProductOperator, m: MatrixProductState) -> complex:
    """<m|op|m> by a single zip-up contraction."""
    env = np.ones((1, 1, 1), dtype=complex)  # (a-conj bond, w bond, b bond)
    for w, t in zip(op.sites, m.sites):
        tmp = np.tensordot(env, t.conj(), axes=([0], [0]))  # (w, b, dout, a')
        tmp = np.tensordot(tmp, w, axes=([0, 2], [0, 1]))  # (b, a', din, w')
        env = np.tensordot(tmp, t, axes=([0, 2], [0, 1]))  # (a', w', b')
    return complex(env[0, 0, 0])


def identity_mpo(site_dims) -> MatrixProductOperator:
    """Identity operator as a bond-1 MPO."""
    sites = tuple(np.eye(int(d), dtype=complex).reshape(1, d, d, 1) for d in site_dims)
    return MatrixProductOperator(sites)


def _overlap_environment(psi_conj: np.ndarray, tensors, i: int) -> np.ndarray:
    """Gradient of <psi|MPS> with respect to site tensor i.

    ``psi_conj`` is conj(amplitudes) reshaped to the physical dims. Returns
    a tensor G with the shape of site i such that <psi|MPS> = sum(G * A_i).
    """
    n = len(tensors)
    x = psi_conj.reshape((1,) + psi_conj.shape)
    for j in range(i):
        x = np.tensordot(tensors[j], x, axes=([0, 1], [0, 1]))
    x = x[..., None]
    for j in range(n - 1, i, -1):
        x = np.tensordot(x, tensors[j], axes=([-2, -1], [1, 2]))
    return x  # axes (l_i, d_i, r_i)


def _refine_against_dense(m: MatrixProductState, state: DenseState, sweeps: int) -> MatrixProductState:
    """Alternating local overlap-maximization sweeps against a dense target."""
    psi_conj = state.amplitudes.conj().reshape(state.site_dims)
    work = canonicalize(m, 0)
    tensors = list(work.sites)
    n = len(tensors)
    for _ in range(sweeps):
        for i in range(n):
            g = _overlap_environment(psi_conj, tensors, i)
            gn = np.linalg.norm(g)
            if gn > 0.0:
                tensors[i] = g.conj() / gn
            if i < n - 1:
                l, d, r = tensors[i].shape
                q, rm = np.linalg.qr(tensors[i].reshape(l * d, r))
                tensors[i] = q.reshape(l, d, q.shape[1])
                tensors[i + 1] = np.tensordot(rm, tensors[i + 1], axes=([1], [0]))
        for i in range(n - 1, -1, -1):
            g = _overlap_environment(psi_conj, tensors, i)
            gn = np.linalg.norm(g)
            if gn > 0.0:
                tensors[i] = g.conj() / gn
            if i > 0:
                l, d, r = tensors[i].shape
                q, rm = np.linalg.qr(tensors[i].reshape(l, d * r).conj().T)
                tensors[i] = q.conj().T.reshape(q.shape[1], d, r)
                tensors[i - 1] = np.tensordot(tensors[i - 1], rm.conj().T, axes=([2], [0]))
    tensors[0] = tensors[0] / np.linalg.norm(tensors[0])
    return MatrixProductState(tuple(tensors), max_bond=m.max_bond, canonical_center=0)
