"""Dense tensor kernel: reshape, contraction and deterministic SVD.

Tensors are plain complex numpy arrays in row-major order. Everything here
is a pure function; nothing mutates its inputs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, ShapeError

# Singular values below RANK_TOL * s_max count as exact zeros when ranks
# are reported; stabilizes "exact representation" checks.
RANK_TOL = 1e-14


@dataclass(frozen=True)
class SvdResult:
    """Factors of m = u @ diag(s) @ vdag, singular values descending.

    ``discarded_weight`` is the sum of squared singular values dropped by
    truncation (zero for an untruncated decomposition).
    """

    u: np.ndarray
    s: np.ndarray
    vdag: np.ndarray
    discarded_weight: float

    @property
    def rank(self) -> int:
        """Number of singular values above the zero threshold."""
        if self.s.size == 0:
            return 0
        return int(np.count_nonzero(self.s > RANK_TOL * self.s[0]))


def reshape(t: np.ndarray, new_dims) -> np.ndarray:
    """Reshape preserving row-major data order."""
    new_dims = tuple(int(d) for d in new_dims)
    if int(np.prod(t.shape, dtype=np.int64)) != int(np.prod(new_dims, dtype=np.int64)):
        raise ShapeError(f"cannot reshape {t.shape} into {new_dims}: size mismatch")
    return t.reshape(new_dims)


def svd(m: np.ndarray, max_keep: int | None = None) -> SvdResult:
    """Deterministic SVD of a rank-2 tensor, optionally truncated.

    Keeps at most ``max_keep`` singular values (and never keeps values that
    are exact zeros by RANK_TOL). Falls back to the slower gesvd driver if
    gesdd fails to converge.
    """
    if m.ndim != 2:
        raise ShapeError(f"svd expects a rank-2 tensor, got rank {m.ndim}")
    try:
        u, s, vdag = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        try:
            u, s, vdag = scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")
        except scipy.linalg.LinAlgError as exc:
            raise NumericalError(
                f"SVD failed to converge for shape {m.shape}, "
                f"norm {np.linalg.norm(m):.3e}"
            ) from exc
    keep = s.size
    if max_keep is not None:
        if max_keep < 1:
            raise ShapeError(f"max_keep must be >= 1, got {max_keep}")
        keep = min(keep, int(max_keep))
    # drop exact numerical zeros, but always keep at least one column
    if s.size and s[0] > 0.0:
        nonzero = int(np.count_nonzero(s > RANK_TOL * s[0]))
        keep = min(keep, max(nonzero, 1))
    discarded = float(np.sum(s[keep:] ** 2))
    return SvdResult(u[:, :keep], s[:keep], vdag[:keep, :], discarded)


def contract(a: np.ndarray, b: np.ndarray, pairs) -> np.ndarray:
    """Contract paired indices of a and b.

    ``pairs`` is a sequence of (axis_of_a, axis_of_b). Result indices are
    the unpaired indices of a followed by those of b, in original order.
    """
    pairs = list(pairs)
    axes_a = [p[0] for p in pairs]
    axes_b = [p[1] for p in pairs]
    for ia, ib in pairs:
        if a.shape[ia] != b.shape[ib]:
            raise ShapeError(
                f"contracted extents differ: a axis {ia} has {a.shape[ia]}, "
                f"b axis {ib} has {b.shape[ib]}"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))
