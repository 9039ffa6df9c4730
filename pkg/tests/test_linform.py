"""Linear-form record enumeration, criteria report, and reversal transform."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bestapprox import linform, oracles, simul
from bestapprox.errors import (
    DomainError,
    PreconditionViolated,
    TieDetected,
)
from bestapprox.exactcore import CertifiedReal, Ordering, QuadSurd, certified_compare
from bestapprox.exactcore import parse_target_vector
from bestapprox.linform import (
    CONSISTENT_FLAG,
    VIOLATED_FLAG,
    LinFormVector,
    ReversedRecord,
)

GOLDEN = parse_target_vector("surd:(1+1*sqrt(5))/2")
ROOT2_3 = parse_target_vector("surd:(0+1*sqrt(2))/1 - 1, surd:(0+1*sqrt(3))/1 - 1")

# frozen from the exhaustive box-scan oracle run (heights <= 1e3)
ROOT2_3_FORM_RECORDS = [
    ((-1, 1, 1), 1),
    ((1, 1, -2), 2),
    ((-3, 2, 3), 3),
    ((-5, 5, 4), 5),
    ((-22, 16, 21), 21),
    ((-27, 21, 25), 25),
    ((6, 35, -28), 35),
    ((-76, 58, 71), 71),
    ((-149, 312, 27), 312),
    ((-225, 370, 98), 370),
    ((79, 495, -388), 495),
]

FIB_M = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


class TestEnumerate:
    def test_golden_fibonacci_heights(self):
        recs = linform.enumerate_best_linform(GOLDEN, 100)
        assert [r.M for r in recs] == FIB_M
        assert [r.m for r in recs] == [
            (-2, 1), (-3, 2), (-5, 3), (-8, 5), (-13, 8),
            (-21, 13), (-34, 21), (-55, 34), (-89, 55), (-144, 89),
        ]

    def test_golden_matches_one_dim_theory(self):
        # d = 1: the linear form |m0 + m1*a| at height q equals ||q*a||,
        # so the record lists coincide with the simultaneous ones
        lin = linform.enumerate_best_linform(GOLDEN, 100)
        sim = simul.enumerate_best_simul(GOLDEN, 100)
        assert [r.M for r in lin] == [r.q for r in sim]
        for lf, sv in zip(lin, sim):
            assert certified_compare(lf.L, sv.xi, Fraction(1, 2**80)) is Ordering.EQUAL

    def test_d2_frozen_records(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1000)
        assert [(r.m, r.M) for r in recs] == ROOT2_3_FORM_RECORDS
        first, last = recs[0], recs[-1]
        first.L.refine_to(Fraction(1, 2**64))
        last.L.refine_to(Fraction(1, 2**64))
        assert Fraction("0.146264") < first.L.lo <= first.L.hi < Fraction("0.146265")
        lo = Fraction("3.795765e-8")
        hi = Fraction("3.795766e-8")
        assert lo < last.L.lo <= last.L.hi < hi

    def test_d2_oracle_equivalence(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1000)
        orc = oracles.oracle_best_linform(ROOT2_3, 1000)
        assert [(r.m, r.M) for r in recs] == [(m, M) for m, M, _ in orc]

    def test_height_one_single_record(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1)
        assert len(recs) == 1
        assert recs[0].m == (-1, 1, 1)
        assert recs[0].M == 1

    def test_heights_increase_values_decrease(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1000)
        for a, b in zip(recs, recs[1:]):
            assert a.M < b.M
            a.L.refine_to(Fraction(1, 2**80))
            b.L.refine_to(Fraction(1, 2**80))
            assert b.L.hi < a.L.lo

    def test_signs_recover_signed_form(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 100)
        for r in recs:
            assert r.sign in (-1, 1)
            signed = CertifiedReal.from_exact(Fraction(r.m[0]))
            for mj, coord in zip(r.mbar, ROOT2_3.coords):
                signed = signed + coord.certified.scaled(Fraction(mj))
            assert signed.scaled(Fraction(r.sign)).sign() == 1

    def test_rational_tie_detected(self):
        target = parse_target_vector("rat:22/7")
        # height 6 reproduces the record value 1/7 from height 1
        with pytest.raises(TieDetected):
            linform.enumerate_best_linform(target, 7)

    def test_half_integer_tie(self):
        with pytest.raises(TieDetected):
            linform.enumerate_best_linform(parse_target_vector("rat:1/2"), 3)

    def test_within_shell_tie(self):
        target = parse_target_vector("rat:1/5, rat:2/5")
        with pytest.raises(TieDetected):
            linform.enumerate_best_linform(target, 1)

    def test_integer_target_exact_zero_record(self):
        recs = linform.enumerate_best_linform(parse_target_vector("rat:7/1"), 1)
        assert [(r.m, r.M) for r in recs] == [((-7, 1), 1)]
        assert recs[0].L.exact == 0
        assert recs[0].sign == 0

    def test_zero_height_rejected(self):
        with pytest.raises(DomainError):
            linform.enumerate_best_linform(ROOT2_3, 0)


class TestMinkowskiLinform:
    def test_d2_fixture_passes(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1000)
        report = linform.check_minkowski_linform(recs)
        assert report.passed
        assert report.checked == len(recs) - 1

    def test_golden_passes(self):
        recs = linform.enumerate_best_linform(GOLDEN, 1000)
        assert linform.check_minkowski_linform(recs).passed

    def test_fault_injection_flagged(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1000)
        bad = list(recs)
        bad[3] = LinFormVector(
            recs[3].m, recs[3].M, CertifiedReal.from_exact(Fraction(1, 2)), 1
        )
        report = linform.check_minkowski_linform(bad)
        assert not report.passed
        assert report.first_violation == 3

    def test_short_sequence_rejected(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1)
        with pytest.raises(DomainError):
            linform.check_minkowski_linform(recs)


class TestCriteria:
    def test_d2_fixture_report(self):
        rep = linform.theorem1_criteria(ROOT2_3, 10**4, 10**3)
        assert rep.sup_q_ratio == Fraction(1183, 41)
        assert rep.sup_m_ratio == Fraction(312, 71)
        assert rep.n_simul == 10
        assert rep.n_linform == 11
        lo, hi = rep.inf_l_ratio
        assert Fraction("0.01365282") < lo <= hi < Fraction("0.01365283")
        lo, hi = rep.inf_xi_ratio
        assert Fraction("0.15637566") < lo <= hi < Fraction("0.15637567")
        lo, hi = rep.margin_simul
        assert Fraction("0.0121914") < lo <= hi < Fraction("0.0121916")
        lo, hi = rep.margin_linform
        assert Fraction("0.00930057") < lo <= hi < Fraction("0.00930058")
        assert rep.flags == (CONSISTENT_FLAG,)

    def test_golden_sup_ratio_two(self):
        rep = linform.theorem1_criteria(GOLDEN, 1000, 1000)
        assert rep.sup_q_ratio == 2
        assert rep.flags == (CONSISTENT_FLAG,)

    def test_growth_detector(self):
        F = Fraction
        growing = [F(2), F(400), F(3), F(1900), F(2), F(9000)]
        assert linform._ratio_growth_detected(growing)
        one_off = [F(3), F(22, 7), F(2), F(1183, 41), F(2)]
        assert not linform._ratio_growth_detected(one_off)
        assert not linform._ratio_growth_detected([F(2), F(2), F(2)])

    def test_violated_flag_string(self):
        assert VIOLATED_FLAG == "criterion (ii) violated at observed scale"


class TestReversal:
    def _prefix(self, n=5):
        return linform.enumerate_best_linform(ROOT2_3, 100)[:n]

    def test_default_scale_and_records(self):
        recs = self._prefix()
        rev, lattice = linform.reversal_transform(recs)
        assert lattice.T == Fraction(1, 512)
        assert lattice.det == 1
        assert lattice.diagonal == (
            Fraction(262144), Fraction(1, 512), Fraction(1, 512)
        )
        assert [r.zbar for r in rev] == [
            (Fraction(1, 32), Fraction(21, 512)),
            (Fraction(-5, 512), Fraction(-1, 128)),
            (Fraction(1, 256), Fraction(3, 512)),
            (Fraction(-1, 512), Fraction(1, 256)),
            (Fraction(1, 512), Fraction(1, 512)),
        ]
        assert [r.m_source for r in rev] == [
            (-22, 16, 21), (5, -5, -4), (-3, 2, 3), (-1, -1, 2), (-1, 1, 1)
        ]
        rev[0].z0.refine_to(Fraction(1, 2**64))
        assert Fraction("126.86") < rev[0].z0.lo <= rev[0].z0.hi < Fraction("126.87")

    def test_exchange_identities(self):
        recs = self._prefix()
        rev, lattice = linform.reversal_transform(recs)
        width = Fraction(1, 2**80)
        for out, rec in zip(rev, reversed(recs)):
            assert max(abs(x) for x in out.zbar) == lattice.T * rec.M
            diff = out.z0 - rec.L.scaled(lattice.T**-lattice.d)
            diff.refine_to(width)
            assert diff.lo <= 0 <= diff.hi and diff.hi - diff.lo <= 2 * width
        # first coordinates strictly increase
        for a, b in zip(rev, rev[1:]):
            assert certified_compare(a.z0, b.z0, width) is Ordering.LESS

    def test_explicit_scale_accepted(self):
        recs = self._prefix()
        rev, lattice = linform.reversal_transform(recs, T=Fraction(1, 1024))
        assert lattice.T == Fraction(1, 1024)
        rev2, lattice2 = linform.reversal_transform(recs, T=Fraction(1, 600))
        assert lattice2.T == Fraction(1, 600)

    def test_scale_one_rejected(self):
        recs = self._prefix()
        with pytest.raises(PreconditionViolated) as exc:
            linform.reversal_transform(recs, T=Fraction(1))
        assert exc.value.name == "scale-below-inverse-height"

    def test_scale_too_large_for_product(self):
        recs = self._prefix()
        with pytest.raises(PreconditionViolated) as exc:
            linform.reversal_transform(recs, T=Fraction(1, 32))
        assert exc.value.name == "value-height-product"

    def test_rank_deficient_prefix_rejected(self):
        recs = self._prefix(2)
        with pytest.raises(PreconditionViolated) as exc:
            linform.reversal_transform(recs)
        assert exc.value.name == "records-span-full-space"

    def test_one_dim_rejected(self):
        recs = linform.enumerate_best_linform(GOLDEN, 50)
        with pytest.raises(PreconditionViolated) as exc:
            linform.reversal_transform(recs)
        assert exc.value.name == "value-height-product"


class TestPlaneProductBound:
    def test_reversal_output_passes(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 100)[:5]
        rev, _ = linform.reversal_transform(recs)
        report = linform.check_plane_product_bound(rev)
        assert report.passed
        assert report.checked == 4

    def test_longer_prefix_passes(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1000)[:8]
        rev, _ = linform.reversal_transform(recs)
        assert linform.check_plane_product_bound(rev).passed

    def test_one_dim_manufactured_passes(self):
        # |zbar| <= 1, |zbar_0| * z0_1 = 4 >= 1; D2^2 = (3/4 - 4)^2 = 10.5625
        # and 8 * d^2 * 4^2 = 128 >= 10.5625
        a = ReversedRecord(CertifiedReal.from_exact(Fraction(3)), (Fraction(1, 2),))
        b = ReversedRecord(CertifiedReal.from_exact(Fraction(8)), (Fraction(1, 4),))
        report = linform.check_plane_product_bound([a, b])
        assert report.passed

    def test_unit_norm_hypothesis_enforced(self):
        a = ReversedRecord(CertifiedReal.from_exact(Fraction(3)), (Fraction(3, 2),))
        b = ReversedRecord(CertifiedReal.from_exact(Fraction(8)), (Fraction(1, 4),))
        with pytest.raises(PreconditionViolated) as exc:
            linform.check_plane_product_bound([a, b])
        assert exc.value.name == "unit-sup-norm"

    def test_unit_product_hypothesis_enforced(self):
        a = ReversedRecord(CertifiedReal.from_exact(Fraction(3)), (Fraction(1, 100),))
        b = ReversedRecord(CertifiedReal.from_exact(Fraction(8)), (Fraction(1, 4),))
        with pytest.raises(PreconditionViolated) as exc:
            linform.check_plane_product_bound([a, b])
        assert exc.value.name == "unit-product-lower"

    def test_violation_reported(self):
        # product hypothesis met with (1/100)*100 = 1 but the plane volume
        # (1*(-3) - (1/100)*100)^2 = 16 exceeds 8 * 1 * 1^2 = 8
        a = ReversedRecord(CertifiedReal.from_exact(Fraction(1)), (Fraction(1, 100),))
        b = ReversedRecord(CertifiedReal.from_exact(Fraction(100)), (Fraction(-3, 1),))
        report = linform.check_plane_product_bound([a, b])
        assert not report.passed
        assert report.first_violation == 0


class TestHelpers:
    def test_linform_margin_matches_fixture(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1000)
        lo, hi = linform.linform_margin(recs, 2)
        assert Fraction("0.00930057") < lo <= hi < Fraction("0.00930058")

    def test_span_rank_tail(self):
        recs = linform.enumerate_best_linform(ROOT2_3, 1000)
        assert linform.span_rank_tail(recs, 3) == 3
        assert linform.span_rank_tail(recs, 2) == 2
        assert linform.span_rank_tail(recs, 1) == 1
        assert linform.span_rank_tail(recs, 0) == 0


_SURDS = st.builds(
    QuadSurd,
    st.integers(-5, 5),
    st.integers(1, 5),
    st.integers(1, 9),
    st.sampled_from([2, 3, 5, 6, 7, 10]),
)


def _vector_of(surd: QuadSurd):
    from bestapprox.exactcore.targets import TargetCoordinate, TargetVector

    coord = TargetCoordinate("surd", surd, Fraction(0), Fraction(0), spec="test")
    return TargetVector([coord], spec="test")


class TestProperties:
    @settings(max_examples=20, deadline=None)
    @given(_SURDS, st.integers(20, 150))
    def test_one_dim_coincides_with_simultaneous(self, surd, bound):
        target = _vector_of(surd)
        lin = linform.enumerate_best_linform(target, bound)
        sim = simul.enumerate_best_simul(target, bound)
        assert [r.M for r in lin] == [r.q for r in sim]
        for lf, sv in zip(lin, sim):
            assert certified_compare(lf.L, sv.xi, Fraction(1, 2**64)) is Ordering.EQUAL

    @settings(max_examples=15, deadline=None)
    @given(_SURDS, st.integers(20, 150))
    def test_minkowski_always_holds(self, surd, bound):
        target = _vector_of(surd)
        recs = linform.enumerate_best_linform(target, bound)
        if len(recs) >= 2:
            assert linform.check_minkowski_linform(recs).passed

    @settings(max_examples=8, deadline=None)
    @given(
        st.integers(-3, 3),
        st.integers(1, 4),
        st.integers(1, 7),
        st.integers(-3, 3),
        st.integers(1, 4),
        st.integers(1, 7),
    )
    def test_d2_mixed_field_oracle_equivalence(self, a1, b1, c1, a2, b2, c2):
        from bestapprox.exactcore.targets import TargetCoordinate, TargetVector

        s1 = QuadSurd(a1, b1, c1, 2)
        s2 = QuadSurd(a2, b2, c2, 3)
        target = TargetVector(
            [
                TargetCoordinate("surd", s1, Fraction(0), Fraction(0), spec="t1"),
                TargetCoordinate("surd", s2, Fraction(0), Fraction(0), spec="t2"),
            ],
            spec="test",
        )
        recs = linform.enumerate_best_linform(target, 60)
        orc = oracles.oracle_best_linform(target, 60)
        assert [(r.m, r.M) for r in recs] == [(m, M) for m, M, _ in orc]
