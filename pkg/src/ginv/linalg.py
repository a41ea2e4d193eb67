"""Dense complex matrix primitives.

SVD-backed rank and norm, numerical Jacobians of maps between
real-coordinatized spaces, and joint kernel dimensions.  Everything here is
a pure function; matrices are plain ``numpy`` arrays of ``complex128`` (or
``float64`` for real-coordinate work).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError, InputError

#: cube root of double-precision machine epsilon, the classical central
#: difference step scale
_FD_STEP_DEFAULT = float(np.finfo(float).eps) ** (1.0 / 3.0)


@dataclass(frozen=True)
class ToleranceConfig:
    """Knobs that make exact algebraic statements numerically decidable.

    rank_cutoff_factor
        Relative singular-value cutoff; a singular value counts toward the
        rank when it exceeds ``rank_cutoff_factor * max(rows, cols) * sigma_max``.
    residual_tol
        Baseline for all residual tests (scaled by powers of the operand
        norms at each call site).
    fd_step_scale
        Central-difference step is ``fd_step_scale * (1 + |x|_inf)``.
    """

    rank_cutoff_factor: float = 1e-12
    residual_tol: float = 1e-8
    fd_step_scale: float = _FD_STEP_DEFAULT

    def __post_init__(self):
        for name in ("rank_cutoff_factor", "residual_tol", "fd_step_scale"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be strictly positive")

    def jacobian_noise_floor(self, scale: float = 1.0) -> float:
        """Absolute singular-value floor for finite-difference Jacobians.

        Central differences carry an O(h^2) truncation error, so singular
        values below a multiple of ``fd_step_scale**2`` (times the natural
        scale of the map) are differentiation noise, not rank.  Tying the
        floor to the step keeps dimension answers consistent whenever the
        step changes.
        """
        return 100.0 * self.fd_step_scale**2 * max(scale, 1.0)


DEFAULT_TOL = ToleranceConfig()


def ensure_finite(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    m = np.asarray(m)
    if not np.all(np.isfinite(m)):  # a complex entry is finite iff both parts are
        raise InputError(f"{what} has non-finite entries")
    return m


def singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values in descending order; empty input gives an empty array."""
    m = ensure_finite(m)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def _rank_cutoff(shape, smax: float, tol: ToleranceConfig, floor: float) -> float:
    return max(tol.rank_cutoff_factor * max(shape) * smax, floor)


def numerical_rank(
    m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL, floor: float = 0.0
) -> int:
    """Count singular values above the relative cutoff; the zero matrix has rank 0.

    ``floor`` is an optional absolute cutoff on top of the relative one;
    finite-difference Jacobians need it because their noise scale is set by
    the step size, not by the largest singular value.
    """
    m = ensure_finite(m)
    if m.size == 0:
        return 0
    s = singular_values(m)
    smax = s[0]
    if smax == 0.0:
        return 0
    cutoff = _rank_cutoff(m.shape, smax, tol, floor)
    return int(np.count_nonzero(s > cutoff))


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    s = singular_values(m)
    return float(s[0]) if s.size else 0.0


def kernel_basis(
    m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL, floor: float = 0.0
) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of a real matrix."""
    m = ensure_finite(m)
    cols = m.shape[1]
    if m.size == 0:
        return np.eye(cols)
    u, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > _rank_cutoff(m.shape, smax, tol, floor)))
    return vh[rank:].conj().T


def orthonormal_range(
    m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL, floor: float = 0.0
) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical column space of a real matrix."""
    m = ensure_finite(m)
    if m.size == 0:
        return np.zeros((m.shape[0], 0))
    u, s, _ = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.zeros((m.shape[0], 0))
    rank = int(np.count_nonzero(s > _rank_cutoff(m.shape, smax, tol, floor)))
    return u[:, :rank]


def finite_diff_jacobian(
    f: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> np.ndarray:
    """Central-difference Jacobian of ``f: R^k -> R^m`` at ``x``.

    Uses a single step ``h = fd_step_scale * (1 + |x|_inf)`` for every
    coordinate; the entrywise error is O(h^2) for three-times-differentiable
    maps.  Raises :class:`EvaluationError` (carrying the offending
    coordinate) when ``f`` returns a non-finite value.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InputError("evaluation point must be a flat real vector")
    h = tol.fd_step_scale * (1.0 + (float(np.max(np.abs(x))) if x.size else 0.0))
    cols = []
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        try:
            fp = np.asarray(f(x + step), dtype=float)
            fm = np.asarray(f(x - step), dtype=float)
        except FloatingPointError as exc:  # propagate with coordinate context
            raise EvaluationError(i, str(exc)) from exc
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise EvaluationError(i)
        cols.append((fp - fm) / (2.0 * h))
    if not cols:
        base = np.asarray(f(x), dtype=float)
        return np.zeros((base.size, 0))
    return np.column_stack(cols)


def joint_kernel_dim(
    maps: Sequence[np.ndarray], tol: ToleranceConfig = DEFAULT_TOL
) -> int:
    """Dimension of the intersection of kernels of real matrices with a common domain."""
    if not maps:
        raise InputError("need at least one matrix")
    mats = [ensure_finite(np.atleast_2d(np.asarray(m, dtype=float))) for m in maps]
    cols = mats[0].shape[1]
    for m in mats[1:]:
        if m.shape[1] != cols:
            raise InputError(
                f"mismatched column counts: {m.shape[1]} != {cols}"
            )
    stacked = np.vstack(mats)
    return cols - numerical_rank(stacked, tol)


# -- real coordinatization ---------------------------------------------------
#
# The basis order is fixed once and for all: real parts row-major, then
# imaginary parts row-major.  Every Jacobian-based dimension in the package
# relies on this convention being used consistently.


def mat_to_realvec(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def realvec_to_mat(v: np.ndarray, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    v = np.asarray(v, dtype=float)
    n = rows * cols
    if v.size != 2 * n:
        raise InputError(f"expected {2 * n} real coordinates, got {v.size}")
    return v[:n].reshape(rows, cols) + 1j * v[n:].reshape(rows, cols)


def herm_to_realvec(m: np.ndarray) -> np.ndarray:
    """Coordinates of a Hermitian matrix: diagonal, then upper re/im pairs."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    iu = np.triu_indices(n, k=1)
    return np.concatenate([m.diagonal().real, m[iu].real, m[iu].imag])


def realvec_to_herm(v: np.ndarray, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.size != n * n:
        raise InputError(f"expected {n * n} coordinates for Hermitian {n}x{n}")
    k = n * (n - 1) // 2
    m = np.diag(v[:n].astype(complex))
    iu = np.triu_indices(n, k=1)
    upper = v[n : n + k] + 1j * v[n + k :]
    m[iu] = upper
    m[(iu[1], iu[0])] = upper.conj()
    return m
