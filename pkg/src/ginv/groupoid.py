"""Groupoid abstraction and four concrete instances.

Arrows compose like functions: ``compose(g1, g2)`` is defined when
``source(g1) = target(g2)`` and the result runs from ``source(g2)`` to
``target(g1)``.  The instances are

* ``ginv``              -- reflexive generalized-inverse pairs over idempotents;
* ``partial_isometry``  -- partial isometries over orthogonal projections;
* ``action``            -- the action groupoid of GL(n, R) acting on R^n;
* ``pair``              -- the pair groupoid of a Euclidean space;
* ``disjoint_union``    -- a tagged union of instances, no cross composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraElement, classify, expm_element, validate_shape
from .errors import CompositionError, GinvError, InputError, PreconditionError
from .geninv import GInvPair, is_ginv_pair
from .linalg import DEFAULT_TOL, ToleranceConfig, numerical_rank, operator_norm
from .reports import CheckRecord, ExperimentReport
from . import sampling


# -- arrows -------------------------------------------------------------------


@dataclass(frozen=True)
class GInvArrow:
    pair: GInvPair


@dataclass(frozen=True)
class IsometryArrow:
    u: AlgebraElement


@dataclass(frozen=True)
class ActionArrow:
    point: tuple  # base point, as a tuple of floats
    g: tuple      # invertible matrix, as nested tuples

    @property
    def point_array(self) -> np.ndarray:
        return np.asarray(self.point, dtype=float)

    @property
    def g_array(self) -> np.ndarray:
        return np.asarray(self.g, dtype=float)

    @classmethod
    def of(cls, point: np.ndarray, g: np.ndarray) -> "ActionArrow":
        return cls(tuple(float(v) for v in np.asarray(point).ravel()),
                   tuple(tuple(float(v) for v in row) for row in np.asarray(g)))


@dataclass(frozen=True)
class PairArrow:
    x: tuple
    y: tuple

    @classmethod
    def of(cls, x: np.ndarray, y: np.ndarray) -> "PairArrow":
        return cls(tuple(float(v) for v in np.asarray(x).ravel()),
                   tuple(float(v) for v in np.asarray(y).ravel()))


@dataclass(frozen=True)
class TaggedArrow:
    index: int
    inner: object


# -- groupoid instances ---------------------------------------------------------


class Groupoid:
    """Common interface; concrete kinds fill in the structure maps."""

    kind: str = "abstract"

    def __init__(self, tol: ToleranceConfig = DEFAULT_TOL):
        self.tol = tol

    # structure maps, implemented per kind
    def source(self, g):
        raise NotImplementedError

    def target(self, g):
        raise NotImplementedError

    def compose(self, g1, g2):
        raise NotImplementedError

    def invert(self, g):
        raise NotImplementedError

    def identity_at(self, x):
        raise NotImplementedError

    # membership and metrics
    def validate_arrow(self, g):
        raise NotImplementedError

    def base_membership_residual(self, x) -> float:
        raise NotImplementedError

    def check_base(self, x):
        res = self.base_membership_residual(x)
        if res > self.tol.residual_tol * (1.0 + self._base_scale(x)):
            raise InputError(f"point fails base membership with residual {res:.3e}")

    def _base_scale(self, x) -> float:
        return 1.0

    def base_distance(self, x, y) -> float:
        raise NotImplementedError

    def arrow_distance(self, g1, g2) -> float:
        raise NotImplementedError

    def arrow_scale(self, g) -> float:
        """Norm scale of an arrow, used to normalize law residuals."""
        return 1.0

    # sampling
    def sample_base_point(self, rng: np.random.Generator):
        raise NotImplementedError

    def sample_arrow(self, rng: np.random.Generator):
        raise NotImplementedError

    def arrow_from(self, x, rng: np.random.Generator):
        """Random arrow whose source is exactly ``x``."""
        raise NotImplementedError

    def _composability_threshold(self, g1, g2) -> float:
        return self.tol.residual_tol * (1.0 + self.arrow_scale(g1) + self.arrow_scale(g2))

    def require_composable(self, g1, g2):
        mismatch = self.base_distance(self.source(g1), self.target(g2))
        if mismatch > self._composability_threshold(g1, g2):
            raise CompositionError(mismatch)


class GInvGroupoid(Groupoid):
    """Pairs (a, b) with aba = a, bab = b over the idempotents of the algebra."""

    kind = "ginv"

    def __init__(self, shape, tol: ToleranceConfig = DEFAULT_TOL):
        super().__init__(tol)
        self.shape = validate_shape(shape)

    def _check_structure(self, g):
        if not isinstance(g, GInvArrow):
            raise InputError(f"foreign arrow of type {type(g).__name__}")
        if g.pair.a.shape != self.shape:
            raise InputError("arrow belongs to an algebra of a different shape")

    def source(self, g: GInvArrow) -> AlgebraElement:
        self._check_structure(g)
        return g.pair.b @ g.pair.a

    def target(self, g: GInvArrow) -> AlgebraElement:
        self._check_structure(g)
        return g.pair.a @ g.pair.b

    def compose(self, g1: GInvArrow, g2: GInvArrow) -> GInvArrow:
        self._check_structure(g1)
        self._check_structure(g2)
        self.require_composable(g1, g2)
        a = g1.pair.a @ g2.pair.a
        b = g2.pair.b @ g1.pair.b
        return GInvArrow(GInvPair.create(a, b, self.tol))

    def invert(self, g: GInvArrow) -> GInvArrow:
        self._check_structure(g)
        return GInvArrow(g.pair.swap())

    def identity_at(self, x: AlgebraElement) -> GInvArrow:
        self.check_base(x)
        return GInvArrow(GInvPair.create(x, x, self.tol))

    def validate_arrow(self, g):
        self._check_structure(g)
        if not is_ginv_pair(g.pair.a, g.pair.b, self.tol):
            raise InputError("arrow fails the reflexive-pair conditions")

    def base_membership_residual(self, x: AlgebraElement) -> float:
        return (x @ x - x).norm()

    def _base_scale(self, x: AlgebraElement) -> float:
        return x.norm() ** 2

    def base_distance(self, x, y) -> float:
        return x.distance(y)

    def arrow_distance(self, g1, g2) -> float:
        return max(g1.pair.a.distance(g2.pair.a), g1.pair.b.distance(g2.pair.b))

    def arrow_scale(self, g) -> float:
        return max(g.pair.a.norm(), g.pair.b.norm()) ** 2

    def sample_base_point(self, rng) -> AlgebraElement:
        return sampling.random_idempotent(rng, self.shape)

    def sample_arrow(self, rng) -> GInvArrow:
        a = sampling.well_conditioned_element(
            rng, self.shape, ranks=sampling.random_block_ranks(rng, self.shape)
        )
        if a.norm() == 0.0:  # all ranks zero: the only reflexive pair is (0, 0)
            return GInvArrow(GInvPair.create(a, a, self.tol))
        from .geninv import sample_ginv_pairs

        seed = int(rng.integers(0, 2**63))
        return GInvArrow(sample_ginv_pairs(a, seed, 1, self.tol)[0])

    def arrow_from(self, x: AlgebraElement, rng) -> GInvArrow:
        self.check_base(x)
        one = AlgebraElement.identity(self.shape)
        u = sampling.random_element(rng, self.shape, scale=0.35)
        w0 = sampling.random_element(rng, self.shape, scale=0.35)
        w = x @ w0 @ x + (one - x) @ w0 @ (one - x)  # commutes with x
        a = expm_element(u) @ x @ expm_element(w)
        b = expm_element(-1.0 * w) @ x @ expm_element(-1.0 * u)
        return GInvArrow(GInvPair.create(a, b, self.tol))


class PartialIsometryGroupoid(Groupoid):
    """Partial isometries over the orthogonal projections of the algebra."""

    kind = "partial_isometry"

    def __init__(self, shape, tol: ToleranceConfig = DEFAULT_TOL):
        super().__init__(tol)
        self.shape = validate_shape(shape)

    def _check_structure(self, g):
        if not isinstance(g, IsometryArrow):
            raise InputError(f"foreign arrow of type {type(g).__name__}")
        if g.u.shape != self.shape:
            raise InputError("arrow belongs to an algebra of a different shape")

    def source(self, g: IsometryArrow) -> AlgebraElement:
        self._check_structure(g)
        return g.u.adjoint() @ g.u

    def target(self, g: IsometryArrow) -> AlgebraElement:
        self._check_structure(g)
        return g.u @ g.u.adjoint()

    def compose(self, g1: IsometryArrow, g2: IsometryArrow) -> IsometryArrow:
        self._check_structure(g1)
        self._check_structure(g2)
        self.require_composable(g1, g2)
        return IsometryArrow(g1.u @ g2.u)

    def invert(self, g: IsometryArrow) -> IsometryArrow:
        self._check_structure(g)
        return IsometryArrow(g.u.adjoint())

    def identity_at(self, x: AlgebraElement) -> IsometryArrow:
        self.check_base(x)
        return IsometryArrow(x)

    def validate_arrow(self, g):
        self._check_structure(g)
        if not classify(g.u, self.tol).partial_isometry:
            raise InputError("arrow is not a partial isometry")

    def base_membership_residual(self, x: AlgebraElement) -> float:
        return max((x @ x - x).norm(), (x.adjoint() - x).norm())

    def _base_scale(self, x: AlgebraElement) -> float:
        return x.norm() ** 2

    def base_distance(self, x, y) -> float:
        return x.distance(y)

    def arrow_distance(self, g1, g2) -> float:
        return g1.u.distance(g2.u)

    def arrow_scale(self, g) -> float:
        return max(g.u.norm(), 1.0)

    def sample_base_point(self, rng) -> AlgebraElement:
        return sampling.random_projection(rng, self.shape)

    def sample_arrow(self, rng) -> IsometryArrow:
        return IsometryArrow(sampling.random_partial_isometry(rng, self.shape))

    def arrow_from(self, p: AlgebraElement, rng) -> IsometryArrow:
        self.check_base(p)
        one = AlgebraElement.identity(self.shape)
        h1 = sampling.random_hermitian_element(rng, self.shape, scale=0.4)
        h0 = sampling.random_hermitian_element(rng, self.shape, scale=0.4)
        h2 = p @ h0 @ p + (one - p) @ h0 @ (one - p)  # Hermitian, commutes with p
        u = expm_element(1j * h1) @ p @ expm_element(1j * h2)
        return IsometryArrow(u)


class ActionGroupoid(Groupoid):
    """Action groupoid of the tautological GL(n, R) action on R^n.

    Arrows are pairs (x, g) with source x and target g.x; composition of
    (y, h) after (x, g) requires y = g.x and yields (x, hg).
    """

    kind = "action"

    def __init__(self, n: int, tol: ToleranceConfig = DEFAULT_TOL):
        super().__init__(tol)
        if n < 1:
            raise InputError("the action groupoid needs dimension >= 1")
        self.n = int(n)

    def _check_structure(self, g):
        if not isinstance(g, ActionArrow):
            raise InputError(f"foreign arrow of type {type(g).__name__}")
        if np.asarray(g.g).shape != (self.n, self.n) or len(g.point) != self.n:
            raise InputError("arrow dimensions do not match the configured action")

    def source(self, g: ActionArrow) -> np.ndarray:
        self._check_structure(g)
        return g.point_array

    def target(self, g: ActionArrow) -> np.ndarray:
        self._check_structure(g)
        return g.g_array @ g.point_array

    def compose(self, g1: ActionArrow, g2: ActionArrow) -> ActionArrow:
        self._check_structure(g1)
        self._check_structure(g2)
        self.require_composable(g1, g2)
        return ActionArrow.of(g2.point_array, g1.g_array @ g2.g_array)

    def invert(self, g: ActionArrow) -> ActionArrow:
        self._check_structure(g)
        ginv = np.linalg.inv(g.g_array)
        return ActionArrow.of(g.g_array @ g.point_array, ginv)

    def identity_at(self, x) -> ActionArrow:
        x = np.asarray(x, dtype=float)
        self.check_base(x)
        return ActionArrow.of(x, np.eye(self.n))

    def validate_arrow(self, g):
        self._check_structure(g)
        if numerical_rank(g.g_array, self.tol) < self.n:
            raise InputError("group component is numerically singular")

    def base_membership_residual(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return 0.0 if x.shape == (self.n,) else float("inf")

    def base_distance(self, x, y) -> float:
        return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))

    def arrow_distance(self, g1, g2) -> float:
        return max(
            float(np.linalg.norm(g1.point_array - g2.point_array)),
            operator_norm(g1.g_array - g2.g_array),
        )

    def arrow_scale(self, g) -> float:
        return max(float(np.linalg.norm(g.point_array)), operator_norm(g.g_array))

    def sample_base_point(self, rng) -> np.ndarray:
        return rng.standard_normal(self.n)

    def sample_arrow(self, rng) -> ActionArrow:
        return ActionArrow.of(
            rng.standard_normal(self.n), sampling.random_invertible(rng, self.n)
        )

    def arrow_from(self, x, rng) -> ActionArrow:
        return ActionArrow.of(np.asarray(x, dtype=float), sampling.random_invertible(rng, self.n))


class PairGroupoid(Groupoid):
    """Pair groupoid of R^k: one arrow (x, y) from x to y for every pair.

    With ``pool_size`` set, base sampling draws from a fixed finite set of
    points, which makes all law residuals exactly zero.
    """

    kind = "pair"

    def __init__(
        self,
        dim: int,
        tol: ToleranceConfig = DEFAULT_TOL,
        pool_size: Optional[int] = None,
        pool_seed: int = 0,
    ):
        super().__init__(tol)
        if dim < 1:
            raise InputError("the pair groupoid needs dimension >= 1")
        self.dim = int(dim)
        self.pool = None
        if pool_size is not None:
            if pool_size < 1:
                raise InputError("point pool must be nonempty")
            pool_rng = np.random.default_rng(pool_seed)
            self.pool = pool_rng.standard_normal((int(pool_size), self.dim))

    def source(self, g: PairArrow) -> np.ndarray:
        self.validate_arrow(g)
        return np.asarray(g.x, dtype=float)

    def target(self, g: PairArrow) -> np.ndarray:
        self.validate_arrow(g)
        return np.asarray(g.y, dtype=float)

    def compose(self, g1: PairArrow, g2: PairArrow) -> PairArrow:
        self.validate_arrow(g1)
        self.validate_arrow(g2)
        self.require_composable(g1, g2)
        return PairArrow(g2.x, g1.y)

    def invert(self, g: PairArrow) -> PairArrow:
        self.validate_arrow(g)
        return PairArrow(g.y, g.x)

    def identity_at(self, x) -> PairArrow:
        x = np.asarray(x, dtype=float)
        self.check_base(x)
        return PairArrow.of(x, x)

    def validate_arrow(self, g):
        if not isinstance(g, PairArrow):
            raise InputError(f"foreign arrow of type {type(g).__name__}")
        if len(g.x) != self.dim or len(g.y) != self.dim:
            raise InputError("arrow dimensions do not match the configured space")

    def base_membership_residual(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return 0.0 if x.shape == (self.dim,) else float("inf")

    def base_distance(self, x, y) -> float:
        return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))

    def arrow_distance(self, g1, g2) -> float:
        return max(
            float(np.linalg.norm(np.asarray(g1.x) - np.asarray(g2.x))),
            float(np.linalg.norm(np.asarray(g1.y) - np.asarray(g2.y))),
        )

    def sample_base_point(self, rng) -> np.ndarray:
        if self.pool is not None:
            return self.pool[int(rng.integers(0, len(self.pool)))]
        return rng.standard_normal(self.dim)

    def sample_arrow(self, rng) -> PairArrow:
        return PairArrow.of(self.sample_base_point(rng), self.sample_base_point(rng))

    def arrow_from(self, x, rng) -> PairArrow:
        return PairArrow.of(np.asarray(x, dtype=float), self.sample_base_point(rng))


class DisjointUnionGroupoid(Groupoid):
    """Disjoint union of groupoids; composition never crosses components."""

    kind = "disjoint_union"

    def __init__(self, parts: Sequence[Groupoid], tol: ToleranceConfig = DEFAULT_TOL):
        super().__init__(tol)
        if not parts:
            raise InputError("disjoint union needs at least one component")
        self.parts = list(parts)

    def _part(self, index: int) -> Groupoid:
        if not 0 <= index < len(self.parts):
            raise InputError(f"component index {index} out of range")
        return self.parts[index]

    def source(self, g: TaggedArrow):
        return (g.index, self._part(g.index).source(g.inner))

    def target(self, g: TaggedArrow):
        return (g.index, self._part(g.index).target(g.inner))

    def compose(self, g1: TaggedArrow, g2: TaggedArrow) -> TaggedArrow:
        if g1.index != g2.index:
            raise CompositionError(
                float("inf"), "arrows live in different components of the union"
            )
        return TaggedArrow(g1.index, self._part(g1.index).compose(g1.inner, g2.inner))

    def invert(self, g: TaggedArrow) -> TaggedArrow:
        return TaggedArrow(g.index, self._part(g.index).invert(g.inner))

    def identity_at(self, x) -> TaggedArrow:
        index, point = x
        return TaggedArrow(index, self._part(index).identity_at(point))

    def validate_arrow(self, g):
        if not isinstance(g, TaggedArrow):
            raise InputError(f"foreign arrow of type {type(g).__name__}")
        self._part(g.index).validate_arrow(g.inner)

    def base_membership_residual(self, x) -> float:
        index, point = x
        return self._part(index).base_membership_residual(point)

    def base_distance(self, x, y) -> float:
        if x[0] != y[0]:
            return float("inf")
        return self._part(x[0]).base_distance(x[1], y[1])

    def arrow_distance(self, g1, g2) -> float:
        if g1.index != g2.index:
            return float("inf")
        return self._part(g1.index).arrow_distance(g1.inner, g2.inner)

    def arrow_scale(self, g) -> float:
        return self._part(g.index).arrow_scale(g.inner)

    def sample_base_point(self, rng):
        index = int(rng.integers(0, len(self.parts)))
        return (index, self.parts[index].sample_base_point(rng))

    def sample_arrow(self, rng) -> TaggedArrow:
        index = int(rng.integers(0, len(self.parts)))
        return TaggedArrow(index, self.parts[index].sample_arrow(rng))

    def arrow_from(self, x, rng) -> TaggedArrow:
        index, point = x
        return TaggedArrow(index, self._part(index).arrow_from(point, rng))


def make_groupoid(kind: str, tol: ToleranceConfig = DEFAULT_TOL, **config) -> Groupoid:
    """Factory keyed on the instance kind; configuration is kind-specific."""
    if kind == "ginv":
        return GInvGroupoid(config.get("shape", (2,)), tol)
    if kind == "partial_isometry":
        return PartialIsometryGroupoid(config.get("shape", (2,)), tol)
    if kind == "action":
        return ActionGroupoid(config.get("n", 2), tol)
    if kind == "pair":
        return PairGroupoid(
            config.get("dim", 3), tol,
            pool_size=config.get("pool_size"), pool_seed=config.get("pool_seed", 0),
        )
    if kind == "disjoint_union":
        return DisjointUnionGroupoid(config["parts"], tol)
    raise InputError(f"unknown groupoid kind {kind!r}")


def isometry_to_ginv(u: AlgebraElement, tol: ToleranceConfig = DEFAULT_TOL) -> GInvArrow:
    """Embed a partial isometry as the reflexive pair (u, u*).

    This map is an injective groupoid morphism: it commutes with source,
    target, composition and inversion.
    """
    if not classify(u, tol).partial_isometry:
        raise PreconditionError("isometry_to_ginv needs a partial isometry")
    return GInvArrow(GInvPair.create(u, u.adjoint(), tol))


# -- axiom verification ----------------------------------------------------------


def verify_axioms(
    G: Groupoid,
    seed: int,
    n_samples: int,
    extra_arrows: Optional[Sequence] = None,
) -> ExperimentReport:
    """Sample arrows and check the groupoid laws, reporting residuals.

    Checks, per sampled chain of three composable arrows: sources and
    targets land in the base, associativity, the left and right identity
    laws, both inverse laws and ``s(g^-1) = t(g)``.  Violations become
    failing records rather than exceptions; ``extra_arrows`` lets a caller
    inject deliberately corrupted arrows as a negative control.
    """
    if n_samples < 1:
        raise InputError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)

    laws = {
        "G1 base membership": "s(g) and t(g) are base points",
        "G2 associativity": "(g3*g2)*g1 = g3*(g2*g1)",
        "G3 left identity": "1_t(g) * g = g",
        "G3 right identity": "g * 1_s(g) = g",
        "G4 left inverse": "inv(g) * g = 1_s(g)",
        "G4 right inverse": "g * inv(g) = 1_t(g)",
        "G4 source of inverse": "s(inv(g)) = t(g)",
    }
    worst = {name: 0.0 for name in laws}
    failures: list[str] = []

    def record(law: str, residual: float, threshold: float, context: str):
        worst[law] = max(worst[law], residual)
        if residual > threshold:
            failures.append(f"{law} violated ({residual:.3e} > {threshold:.3e}) at {context}")

    for k in range(n_samples):
        x0 = G.sample_base_point(rng)
        g1 = G.arrow_from(x0, rng)
        g2 = G.arrow_from(G.target(g1), rng)
        g3 = G.arrow_from(G.target(g2), rng)
        loose = G.sample_arrow(rng)
        scale = max(G.arrow_scale(g) for g in (g1, g2, g3, loose))
        thr = G.tol.residual_tol * (1.0 + scale**3)

        for g in (g1, g2, g3, loose):
            try:
                G.validate_arrow(g)
            except InputError as exc:
                failures.append(f"G1 base membership violated at sample {k}: {exc}")
                continue
            res = max(
                G.base_membership_residual(G.source(g)),
                G.base_membership_residual(G.target(g)),
            )
            record("G1 base membership", res, thr, f"sample {k}")

        left = G.compose(G.compose(g3, g2), g1)
        right = G.compose(g3, G.compose(g2, g1))
        record("G2 associativity", G.arrow_distance(left, right), thr, f"sample {k}")

        for g in (g1, g2):
            s, t = G.source(g), G.target(g)
            record(
                "G3 right identity",
                G.arrow_distance(G.compose(g, G.identity_at(s)), g),
                thr, f"sample {k}",
            )
            record(
                "G3 left identity",
                G.arrow_distance(G.compose(G.identity_at(t), g), g),
                thr, f"sample {k}",
            )
            inv = G.invert(g)
            record(
                "G4 right inverse",
                G.arrow_distance(G.compose(g, inv), G.identity_at(t)),
                thr, f"sample {k}",
            )
            record(
                "G4 left inverse",
                G.arrow_distance(G.compose(inv, g), G.identity_at(s)),
                thr, f"sample {k}",
            )
            record("G4 source of inverse", G.base_distance(G.source(inv), t), thr, f"sample {k}")

    injected_failures: list[str] = []
    for j, g in enumerate(extra_arrows or []):
        context = f"injected arrow {j}"
        try:
            G.validate_arrow(g)
            s, t = G.source(g), G.target(g)
            thr = G.tol.residual_tol * (1.0 + G.arrow_scale(g) ** 3)
            before = len(failures)
            record("G1 base membership",
                   max(G.base_membership_residual(s), G.base_membership_residual(t)),
                   thr, context)
            record("G3 right identity",
                   G.arrow_distance(G.compose(g, G.identity_at(s)), g), thr, context)
            record("G4 right inverse",
                   G.arrow_distance(G.compose(g, G.invert(g)), G.identity_at(t)), thr, context)
            injected_failures.extend(failures[before:])
        except GinvError as exc:
            injected_failures.append(
                f"arrow membership violated at {context}: {exc}"
            )

    report = ExperimentReport(
        suite=f"groupoid-axioms-{G.kind}",
        config={"seed": seed, "n_samples": n_samples, "kind": G.kind,
                "residual_tol": G.tol.residual_tol},
    )
    law_failures = {name: [f for f in failures if f.startswith(name)] for name in laws}
    for name, anchor in laws.items():
        report.add(
            CheckRecord(
                name=name,
                anchor=anchor,
                passed=not law_failures[name],
                value=worst[name],
                details="; ".join(law_failures[name][:3]),
            )
        )
    if extra_arrows:
        report.add(
            CheckRecord(
                name="injected-arrow control",
                anchor="corrupted arrows violate a groupoid law",
                passed=bool(injected_failures),
                value=len(injected_failures),
                details="; ".join(injected_failures[:3]) or "corruption not detected",
            )
        )
    return report
