import numpy as np
import pytest

from ginv.algebra import AlgebraElement
from ginv.continuity import (
    SequenceFamily,
    continuity_experiment,
    discontinuity_demo,
    make_family,
)
from ginv.errors import InputError
from ginv.linalg import numerical_rank
from ginv.sampling import well_conditioned_element


def diag(*values):
    return AlgebraElement.from_blocks([np.diag([complex(v) for v in values])])


BASE = diag(1, 0)


class TestMakeFamily:
    def test_constant(self):
        fam = make_family("constant", BASE)
        assert all(t.distance(BASE) == 0.0 for t in fam.terms())

    def test_rank_dropping_appends_direction(self):
        fam = make_family("rank_dropping", BASE)
        a5 = fam.generator(5)
        assert a5.distance(diag(1, 0.2)) <= 1e-12
        assert numerical_rank(a5.blocks[0]) == 2
        assert np.isclose(a5.distance(BASE), 0.2)

    def test_rank_preserving_keeps_rank(self):
        fam = make_family("rank_preserving", BASE)
        assert fam.generator(4).distance(diag(1.25, 0)) <= 1e-12
        for n in (1, 3, 9):
            assert numerical_rank(fam.generator(n).blocks[0]) == 1

    def test_zero_base_rejected(self):
        with pytest.raises(InputError):
            make_family("rank_dropping", AlgebraElement.zeros((2,)))

    def test_full_rank_base_cannot_drop(self):
        with pytest.raises(InputError):
            make_family("rank_dropping", AlgebraElement.identity((2,)))

    def test_validation_accepts_reciprocal_decay(self):
        make_family("rank_dropping", BASE).validate()
        make_family("rank_preserving", BASE).validate()

    def test_validation_rejects_non_convergent(self):
        fam = SequenceFamily("custom", lambda n: diag(1, 1), BASE)
        with pytest.raises(InputError):
            fam.validate()


class TestContinuityExperiment:
    def test_divergent_family(self):
        fam = SequenceFamily("custom", lambda n: diag(1, 1 / n), BASE)
        verdict = continuity_experiment(fam)
        assert not verdict.pair_converges and not verdict.source_converges
        # the pseudo-inverse norms blow up like n
        assert verdict.mp_norms[-1] == pytest.approx(fam.horizon)

    def test_convergent_family(self):
        fam = SequenceFamily("custom", lambda n: diag(1 + 1 / n, 0), BASE)
        verdict = continuity_experiment(fam)
        assert verdict.pair_converges and verdict.source_converges

    def test_constant_family(self):
        verdict = continuity_experiment(make_family("constant", BASE))
        assert verdict.pair_converges and verdict.source_converges

    def test_zero_limit_rejected(self):
        fam = SequenceFamily(
            "custom", lambda n: diag(1 / n, 0), AlgebraElement.zeros((2,))
        )
        with pytest.raises(InputError):
            continuity_experiment(fam)

    def test_verdicts_agree_across_random_families(self, rng):
        for shape in [(2,), (3,), (2, 1)]:
            for i in range(8):
                ranks = tuple(max(0, n - 1) for n in shape)
                base = well_conditioned_element(rng, shape, ranks=ranks)
                kind = ("rank_preserving", "rank_dropping")[i % 2]
                verdict = continuity_experiment(make_family(kind, base))
                assert verdict.pair_converges == verdict.source_converges
                assert verdict.pair_converges == (kind == "rank_preserving")


class TestDiscontinuityDemo:
    def test_singular_base(self):
        report = discontinuity_demo(BASE)
        assert report.all_passed
        names = {r.name for r in report.records}
        assert names == {"rank-preserving trace", "rank-dropping trace"}

    def test_shift_base(self):
        e12 = AlgebraElement.from_blocks([np.array([[0, 1], [0, 0]], dtype=complex)])
        assert discontinuity_demo(e12).all_passed

    def test_invertible_base_rejected(self):
        with pytest.raises(InputError):
            discontinuity_demo(AlgebraElement.identity((2,)))

    def test_zero_base_rejected(self):
        with pytest.raises(InputError):
            discontinuity_demo(AlgebraElement.zeros((2,)))
