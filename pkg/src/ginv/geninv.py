"""Moore-Penrose inversion and reflexive generalized-inverse pairs.

Two independent inversion routes are provided: a blockwise SVD
pseudo-inverse (rank decided by the shared relative cutoff) and a
Newton-Schulz iteration that serves as a cross-check.  Pairs ``(a, b)``
with ``aba = a`` and ``bab = b`` are the arrows of the generalized-inverse
groupoid; this module owns their construction and validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement
from .errors import ConsistencyError, ConvergenceError, InputError, ShapeMismatchError
from .linalg import DEFAULT_TOL, ToleranceConfig, numerical_rank


@dataclass(frozen=True)
class PenroseResidual:
    """Norm residuals of the four Moore-Penrose equations.

    r1: ||aba - a||   r2: ||bab - b||   r3: ||(ba)* - ba||   r4: ||(ab)* - ab||
    """

    r1: float
    r2: float
    r3: float
    r4: float

    def max(self) -> float:
        return max(self.r1, self.r2, self.r3, self.r4)


@dataclass(frozen=True)
class GInvPair:
    """An ordered pair (a, b) with aba = a and bab = b, residuals attached.

    Construct through :meth:`create`, which enforces both reflexivity
    residuals; the raw constructor is reserved for deliberately invalid
    pairs in negative-control tests.
    """

    a: AlgebraElement
    b: AlgebraElement
    residual_aba: float
    residual_bab: float

    @classmethod
    def create(
        cls, a: AlgebraElement, b: AlgebraElement, tol: ToleranceConfig = DEFAULT_TOL
    ) -> "GInvPair":
        if a.shape != b.shape:
            raise ShapeMismatchError("pair components must share the algebra shape")
        r_aba = (a @ b @ a - a).norm()
        r_bab = (b @ a @ b - b).norm()
        na, nb = a.norm(), b.norm()
        if r_aba > tol.residual_tol * (1.0 + na**2 * nb):
            raise InputError(f"aba = a fails with residual {r_aba:.3e}")
        if r_bab > tol.residual_tol * (1.0 + nb**2 * na):
            raise InputError(f"bab = b fails with residual {r_bab:.3e}")
        return cls(a, b, r_aba, r_bab)

    def swap(self) -> "GInvPair":
        return GInvPair(self.b, self.a, self.residual_bab, self.residual_aba)


def _pinv_block(m: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    u, s, vh = np.linalg.svd(m)
    r = numerical_rank(m, tol)
    if r == 0:
        return np.zeros_like(m.conj().T)
    inv = np.zeros_like(s)
    inv[:r] = 1.0 / s[:r]
    return (vh.conj().T * inv) @ u.conj().T


def moore_penrose(a: AlgebraElement, tol: ToleranceConfig = DEFAULT_TOL) -> AlgebraElement:
    """Blockwise SVD pseudo-inverse.

    The rank decision is delegated entirely to the shared relative cutoff,
    so rank-drop experiments have a single knob.  The output is independent
    of SVD sign and phase conventions.
    """
    return AlgebraElement(a.shape, tuple(_pinv_block(b, tol) for b in a.blocks))


def newton_schulz(
    a: AlgebraElement, tol: ToleranceConfig = DEFAULT_TOL, max_iter: int = 64
) -> AlgebraElement:
    """Iterative pseudo-inverse, the independent cross-check route.

    Iterates ``X <- X (2*1 - a X)`` from ``X0 = a* / sigma_max(a)^2`` and
    stops when the relative step drops below ``residual_tol``.  Near-rank-
    deficient inputs either settle on the pseudo-inverse of the truncated
    rank (tiny directions grow too slowly to move the stopping test) or
    exhaust ``max_iter`` and raise :class:`ConvergenceError`.
    """
    if max_iter < 1:
        raise InputError("max_iter must be >= 1")
    smax = a.norm()
    if smax == 0.0:
        raise InputError("newton_schulz needs a nonzero element")
    x = a.adjoint() * (1.0 / smax**2)
    two = AlgebraElement.identity(a.shape) * 2.0
    for _ in range(max_iter):
        x_next = x @ (two - a @ x)
        step = (x_next - x).norm()
        if step <= tol.residual_tol * max(x.norm(), 1e-300):
            return x_next
        x = x_next
    raise ConvergenceError(step / max(x.norm(), 1e-300), max_iter)


def penrose_residuals(a: AlgebraElement, b: AlgebraElement) -> PenroseResidual:
    """The four Moore-Penrose equation residual norms, exact up to rounding."""
    if a.shape != b.shape:
        raise ShapeMismatchError("operands must share the algebra shape")
    ab, ba = a @ b, b @ a
    return PenroseResidual(
        r1=(a @ b @ a - a).norm(),
        r2=(b @ a @ b - b).norm(),
        r3=(ba.adjoint() - ba).norm(),
        r4=(ab.adjoint() - ab).norm(),
    )


def is_ginv_pair(
    a: AlgebraElement, b: AlgebraElement, tol: ToleranceConfig = DEFAULT_TOL
) -> bool:
    """True when both reflexivity residuals pass.

    The two symmetry conditions are deliberately not required: the set of
    reflexive pairs is strictly larger than the Moore-Penrose graph.
    """
    if a.shape != b.shape:
        raise ShapeMismatchError("operands must share the algebra shape")
    r = penrose_residuals(a, b)
    na, nb = a.norm(), b.norm()
    return (
        r.r1 <= tol.residual_tol * (1.0 + na**2 * nb)
        and r.r2 <= tol.residual_tol * (1.0 + nb**2 * na)
    )


def sample_ginv_pairs(
    a: AlgebraElement,
    seed: int,
    count: int,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> list:
    """Reflexive-inverse pairs of ``a`` drawn from the classical parametrization.

    Inner inverses of ``a`` form the affine family ``a+ + U - a+ a U a a+``;
    products ``G1 a G2`` of two inner inverses sweep the reflexive inverses.
    ``U`` and ``V`` get independent standard normal real and imaginary
    parts, scaled by ``1 / (1 + norm(a+))`` to keep residual scaling uniform
    across test matrices.  Deterministic for a fixed seed.
    """
    if count < 1:
        raise InputError("count must be >= 1")
    rng = np.random.default_rng(seed)
    dagger = moore_penrose(a, tol)
    proj_left = dagger @ a   # a+ a
    proj_right = a @ dagger  # a a+
    scale = 1.0 / (1.0 + dagger.norm())

    def inner_inverse(u: AlgebraElement) -> AlgebraElement:
        return dagger + u - proj_left @ u @ proj_right

    def random_element() -> AlgebraElement:
        blocks = [
            scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            for n in a.shape
        ]
        return AlgebraElement(a.shape, tuple(blocks))

    pairs = []
    for _ in range(count):
        g1 = inner_inverse(random_element())
        g2 = inner_inverse(random_element())
        b = g1 @ a @ g2
        try:
            pairs.append(GInvPair.create(a, b, tol))
        except InputError as exc:
            raise ConsistencyError(
                f"sampled reflexive inverse failed validation: {exc}"
            ) from exc
    return pairs


def mp_pair(a: AlgebraElement, tol: ToleranceConfig = DEFAULT_TOL) -> GInvPair:
    """Pair an element with its Moore-Penrose inverse: ``a -> (a, a+)``."""
    return GInvPair.create(a, moore_penrose(a, tol), tol)


def first_element(pair: GInvPair) -> AlgebraElement:
    """First component of a pair; left inverse of :func:`mp_pair` (exact)."""
    return pair.a
