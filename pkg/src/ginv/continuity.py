"""Continuity experiments for Moore-Penrose inversion.

Pseudo-inversion is famously discontinuous at rank drops.  The criterion
exercised here: for a sequence converging to a nonzero regular limit, the
paired map ``a -> (a, a+)`` converges exactly when the source projections
``a+ a`` converge.  Families are built analytically (SVD-aligned
perturbations), so their rank behavior is certain rather than
probabilistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import AlgebraElement
from .errors import ConsistencyError, InputError
from .geninv import moore_penrose
from .linalg import DEFAULT_TOL, ToleranceConfig, numerical_rank
from .reports import CheckRecord, ExperimentReport

FAMILY_KINDS = ("rank_preserving", "rank_dropping", "constant", "custom")

#: threshold of the convergence trend test, surfaced in every report
TREND_THRESHOLD = 1e-4
DEFAULT_HORIZON = 64


@dataclass
class SequenceFamily:
    """A sequence ``a_n`` with a declared limit and a finite horizon.

    ``generator`` maps an index ``n >= 1`` to an element.  ``validate``
    decides whether the declared limit is credible on the horizon prefix:
    distances must trend down and the final distance must be small either
    absolutely or relative to the initial distance (families decaying like
    ``1/n`` are legitimate and must be accepted).
    """

    kind: str
    generator: Callable[[int], AlgebraElement]
    limit: AlgebraElement
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise InputError(f"unknown family kind {self.kind!r}")
        if self.horizon < 8:
            raise InputError("horizon must be at least 8")

    def terms(self) -> list:
        return [self.generator(n) for n in range(1, self.horizon + 1)]

    def distances(self) -> np.ndarray:
        return np.array([t.distance(self.limit) for t in self.terms()])

    def validate(self):
        d = self.distances()
        if not np.all(np.isfinite(d)):
            raise InputError("family terms must stay finite")
        dmax = float(np.max(d)) if d.size else 0.0
        if dmax == 0.0:
            return  # constant family
        increases = np.sum(np.diff(d) > 0.05 * dmax + 1e-12)
        if increases > 0:
            raise InputError("distances to the declared limit are not decreasing")
        final_ok = d[-1] <= max(1e-6 * (1.0 + self.limit.norm()), 4.0 * dmax / self.horizon)
        if not final_ok:
            raise InputError(
                f"final distance {d[-1]:.3e} is inconsistent with convergence to the limit"
            )


@dataclass(frozen=True)
class ContinuityVerdict:
    """Outcome of one convergence experiment.

    For a nonzero limit the two flags must agree; a disagreeing pair is a
    broken invariant, not a valid verdict, and is never returned.
    """

    pair_converges: bool
    source_converges: bool
    distances_pair: tuple
    distances_source: tuple
    mp_norms: tuple


def _svd_of_first_deficient_block(base: AlgebraElement, tol: ToleranceConfig):
    """Pick a block with deficient rank; return its index and SVD."""
    for i, b in enumerate(base.blocks):
        if numerical_rank(b, tol) < b.shape[0]:
            return i, np.linalg.svd(b)
    raise InputError("every block has full rank: no vanishing direction to append")


def make_family(
    kind: str,
    base: AlgebraElement,
    horizon: int = DEFAULT_HORIZON,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SequenceFamily:
    """Analytic perturbation family converging to ``base``.

    rank_preserving  a_n = base + (1/n) P with P supported on the nonzero
                     singular directions of a block, so every term keeps the
                     rank signature of the limit.
    rank_dropping    a_n = base + (1/n) w with w a fresh singular direction
                     outside the range of a deficient block: every term has
                     one extra rank, the limit loses it.
    constant         a_n = base.
    """
    if kind == "custom":
        raise InputError("custom families are built directly through SequenceFamily")
    if kind not in FAMILY_KINDS:
        raise InputError(f"unknown family kind {kind!r}")

    if kind == "constant":
        return SequenceFamily(kind, lambda n: base, base, horizon)

    if base.norm() == 0.0:
        raise InputError(f"{kind} families need a nonzero base")

    if kind == "rank_preserving":
        index = next(
            (i for i, b in enumerate(base.blocks) if numerical_rank(b, tol) > 0), None
        )
        if index is None:
            raise InputError("rank-preserving perturbation needs a block of positive rank")
        u, s, vh = np.linalg.svd(base.blocks[index])
        r = numerical_rank(base.blocks[index], tol)
        direction = (u[:, :r] * s[:r]) @ vh[:r]  # scaled copy of the rank support

        def gen(n: int, index=index, direction=direction) -> AlgebraElement:
            blocks = list(base.blocks)
            blocks[index] = blocks[index] + direction / n
            return AlgebraElement(base.shape, tuple(blocks))

        return SequenceFamily(kind, gen, base, horizon)

    index, (u, s, vh) = _svd_of_first_deficient_block(base, tol)
    r = numerical_rank(base.blocks[index], tol)
    direction = np.outer(u[:, r], vh[r].conj())  # fresh singular direction

    def gen(n: int, index=index, direction=direction) -> AlgebraElement:
        blocks = list(base.blocks)
        blocks[index] = blocks[index] + direction / n
        return AlgebraElement(base.shape, tuple(blocks))

    return SequenceFamily(kind, gen, base, horizon)


def _trend_converges(d: np.ndarray) -> bool:
    """Trend test: either the tail sits below the threshold, or the whole
    trace decays like a convergent sequence (covers 1/n-type families)."""
    m = len(d)
    tail = d[3 * m // 4 :]
    dmax = float(np.max(d)) if d.size else 0.0
    if dmax == 0.0:
        return True
    non_increasing = not np.any(np.diff(tail) > 0.1 * np.max(tail) + 1e-12)
    if np.max(tail) <= TREND_THRESHOLD and non_increasing:
        return True
    overall_decay = d[-1] <= (8.0 / m) * dmax
    strictly_trending = d[-1] < 0.5 * dmax and non_increasing
    return overall_decay and strictly_trending


def continuity_experiment(
    fam: SequenceFamily, tol: ToleranceConfig = DEFAULT_TOL
) -> ContinuityVerdict:
    """Track ``(a_n, a_n+)`` and the source projections along a family.

    Returns the two convergence verdicts; for nonzero limits they must
    agree, and a disagreement raises :class:`ConsistencyError` because it
    would falsify the source criterion the experiment exists to check.
    """
    fam.validate()
    if fam.limit.norm() == 0.0:
        raise InputError("the experiment requires a nonzero limit")
    limit_dagger = moore_penrose(fam.limit, tol)
    limit_source = limit_dagger @ fam.limit

    d_pair, d_source, mp_norms = [], [], []
    for a_n in fam.terms():
        if a_n.norm() == 0.0:
            raise InputError("family terms must stay nonzero")
        dagger = moore_penrose(a_n, tol)
        d_pair.append(max(a_n.distance(fam.limit), dagger.distance(limit_dagger)))
        d_source.append((dagger @ a_n).distance(limit_source))
        mp_norms.append(dagger.norm())

    pair_ok = _trend_converges(np.array(d_pair))
    source_ok = _trend_converges(np.array(d_source))
    if pair_ok != source_ok:
        raise ConsistencyError(
            "paired convergence and source convergence disagree: "
            f"pair={pair_ok}, source={source_ok} for kind {fam.kind!r}"
        )
    return ContinuityVerdict(
        pair_converges=pair_ok,
        source_converges=source_ok,
        distances_pair=tuple(d_pair),
        distances_source=tuple(d_source),
        mp_norms=tuple(mp_norms),
    )


def discontinuity_demo(
    base: AlgebraElement, tol: ToleranceConfig = DEFAULT_TOL
) -> ExperimentReport:
    """Two families with the same limit, one continuous and one divergent.

    Needs a singular nonzero base: at invertible elements pseudo-inversion
    is continuous and there is no discontinuity to exhibit.
    """
    if base.norm() == 0.0:
        raise InputError("base must be nonzero")
    if all(numerical_rank(b, tol) == b.shape[0] for b in base.blocks):
        raise InputError("base is invertible: pseudo-inversion is continuous there")

    report = ExperimentReport(
        suite="mp-discontinuity",
        config={
            "shape": list(base.shape),
            "residual_tol": tol.residual_tol,
            "trend_threshold": TREND_THRESHOLD,
        },
    )
    preserving = make_family("rank_preserving", base, tol=tol)
    verdict_p = continuity_experiment(preserving, tol)
    report.add(
        CheckRecord(
            name="rank-preserving trace",
            anchor="rank-stable perturbations keep a -> a+ continuous",
            passed=verdict_p.pair_converges,
            value=float(verdict_p.distances_pair[-1]),
            details=f"pair distances {_fmt(verdict_p.distances_pair)}",
        )
    )
    dropping = make_family("rank_dropping", base, tol=tol)
    verdict_d = continuity_experiment(dropping, tol)
    norms = np.array(verdict_d.mp_norms)
    diverges = norms[-1] > 10.0 * norms[0] and bool(np.all(np.diff(norms[len(norms) // 2 :]) > 0))
    report.add(
        CheckRecord(
            name="rank-dropping trace",
            anchor="a rank drop in the limit blows up |a_n+|",
            passed=(not verdict_d.pair_converges) and diverges,
            value=float(norms[-1]),
            details=f"pseudo-inverse norms {_fmt(verdict_d.mp_norms)}",
        )
    )
    return report


def _fmt(values, head: int = 4) -> str:
    shown = ", ".join(f"{v:.3e}" for v in values[:head])
    return f"[{shown}, ..., {values[-1]:.3e}]"
