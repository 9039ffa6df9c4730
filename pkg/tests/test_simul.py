"""Simultaneous-approximation enumeration and volume-bound certification."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bestapprox import oracles, simul
from bestapprox.errors import (
    DomainError,
    InternalCertificateFailure,
    NotSpanning,
    TieDetected,
    UndecidablePrecision,
)
from bestapprox.exactcore import CertifiedReal, QuadSurd, parse_target_vector

GOLDEN = parse_target_vector("surd:(1+1*sqrt(5))/2")
ROOT2_3 = parse_target_vector("surd:(0+1*sqrt(2))/1 - 1, surd:(0+1*sqrt(3))/1 - 1")

# frozen from the exhaustive oracle run (q <= 1e4)
ROOT2_3_RECORDS = [
    (1, (0, 1)),
    (3, (1, 2)),
    (7, (3, 5)),
    (22, (9, 16)),
    (34, (14, 25)),
    (41, (17, 30)),
    (1183, (490, 866)),
    (1463, (606, 1071)),
    (2646, (1096, 1937)),
    (4109, (1702, 3008)),
]

FIB_Q = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


class TestEnumerate:
    def test_golden_fibonacci(self):
        recs = simul.enumerate_best_simul(GOLDEN, 100)
        assert [r.q for r in recs] == FIB_Q
        assert [r.a for r in recs] == [(2,), (3,), (5,), (8,), (13,), (21,), (34,), (55,), (89,), (144,)]

    def test_d2_frozen_records(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        assert [(r.q, r.a) for r in recs] == ROOT2_3_RECORDS

    def test_d2_oracle_equivalence(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        orc = oracles.oracle_best_simul(ROOT2_3, 10**4)
        assert [(r.q, r.a) for r in recs] == [(q, a) for q, a, _ in orc]

    def test_small_q_max_returns_first_record_only(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 2)
        assert [(r.q, r.a) for r in recs] == [(1, (0, 1))]

    def test_monotone(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        for u, v in zip(recs, recs[1:]):
            assert u.q < v.q
            u.xi.refine_to(Fraction(1, 1 << 80))
            v.xi.refine_to(Fraction(1, 1 << 80))
            assert v.xi.hi < u.xi.lo

    def test_rational_target_tie(self):
        rat = parse_target_vector("rat:22/7")
        with pytest.raises(TieDetected) as exc:
            simul.enumerate_best_simul(rat, 20)
        assert exc.value.q_pair == (1, 6)

    def test_half_integer_tie(self):
        half = parse_target_vector("rat:1/2")
        with pytest.raises(TieDetected):
            simul.enumerate_best_simul(half, 5)

    def test_ball_target_matches_exact(self):
        ball = parse_target_vector("dec:1.41421356237309504880168872420969~1e-25 - 1")
        exact = parse_target_vector("surd:(0+1*sqrt(2))/1 - 1")
        b = simul.enumerate_best_simul(ball, 50)
        e = simul.enumerate_best_simul(exact, 50)
        assert [(r.q, r.a) for r in b] == [(r.q, r.a) for r in e]
        assert [r.q for r in e] == [1, 2, 5, 12, 29]

    def test_ball_straddling_integer_undecidable(self):
        ball = parse_target_vector("dec:1.0000000001~1/1000")
        with pytest.raises(UndecidablePrecision):
            simul.enumerate_best_simul(ball, 10)

    def test_wide_ball_undecidable_at_comparison(self):
        ball = parse_target_vector("dec:0.5000000001~1/100000")
        with pytest.raises((UndecidablePrecision, TieDetected)):
            simul.enumerate_best_simul(ball, 100)

    def test_bad_q_max(self):
        with pytest.raises(DomainError):
            simul.enumerate_best_simul(GOLDEN, 0)


class TestChecks:
    def setup_method(self):
        self.recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        self.golden = simul.enumerate_best_simul(GOLDEN, 10**4)

    def test_minkowski_passes(self):
        assert simul.check_minkowski_simul(self.recs).passed
        assert simul.check_minkowski_simul(self.golden).passed

    def test_minkowski_fault_injection(self):
        bad = list(self.golden)
        bad[3] = simul.ApproxVector(
            bad[3].q, bad[3].a, CertifiedReal.from_exact(Fraction(1, 2))
        )
        rep = simul.check_minkowski_simul(bad)
        assert not rep.passed
        assert rep.first_violation == 3

    def test_volume_bounds_pass(self):
        rep = simul.check_two_dim_volume_bounds(self.recs, ROOT2_3)
        assert rep.passed
        assert rep.checked == len(self.recs) - 1

    def test_volume_bounds_d1_delta_is_one(self):
        rep = simul.check_two_dim_volume_bounds(self.golden, GOLDEN)
        assert rep.passed
        assert set(rep.delta2_sq) == {1}

    def test_volume_bounds_fault_injection(self):
        bad = list(self.golden)
        bad[2] = simul.ApproxVector(
            bad[2].q, bad[2].a, CertifiedReal.from_exact(Fraction(1, 2))
        )
        rep = simul.check_two_dim_volume_bounds(bad, GOLDEN)
        assert not rep.passed
        assert rep.first_violation == (2, "upper")

    def test_chain_d2(self):
        chain = simul.build_independence_chain(self.recs)
        assert chain.indices == (0, 1, 2)
        assert chain.volumes_sq[-1] == 1
        assert chain.volumes_sq[0] == 1 + 0 + 1  # |(1, 0, 1)|^2

    def test_chain_d1(self):
        chain = simul.build_independence_chain(self.golden)
        assert chain.indices == (0, 1)
        assert chain.volumes_sq == (5, 1)  # |(1, 2)|^2 then completed plane

    def test_chain_not_spanning(self):
        short = self.recs[:2]
        with pytest.raises((NotSpanning, DomainError)):
            simul.build_independence_chain(short)

    def test_volume_growth_check(self):
        chain = simul.build_independence_chain(self.recs)
        assert simul.check_lemma_volume_growth(chain, self.recs).passed
        g_chain = simul.build_independence_chain(self.golden)
        assert simul.check_lemma_volume_growth(g_chain, self.golden).passed

    def test_volume_growth_fault_injection(self):
        chain = simul.build_independence_chain(self.recs)
        fake = simul.IndependenceChain(
            chain.indices, chain.basis, (chain.volumes_sq[0], 10**12, chain.volumes_sq[2])
        )
        rep = simul.check_lemma_volume_growth(fake, self.recs)
        assert not rep.passed

    def test_quantitative_lower_bound(self):
        assert simul.quantitative_badness_check(self.recs, ROOT2_3).passed
        assert simul.quantitative_badness_check(self.golden, GOLDEN).passed

    def test_k_constant_golden(self):
        kc = simul.k_constant(GOLDEN)
        # 1/K^2 = 4*1*(1 + phi^2), phi^2 = phi + 1 -> 4*(2 + phi) = 8 + 4*phi
        expect = 8 + 4 * (1 + 5**0.5) / 2
        assert abs(float(1 / kc.k_sq) - expect) < 1e-12
        assert 0 < kc.k_sq <= Fraction(1, 4)
        assert kc.k_sq <= kc.k_sq_hi
        assert kc.k_sq_hi - kc.k_sq < Fraction(1, 1 << 100)


class TestMargin:
    def test_golden_full_range_margin(self):
        recs = simul.enumerate_best_simul(GOLDEN, 10**4)
        assert len(recs) == 19
        lo, hi = simul.badness_margin(recs, 1)
        # frozen: minimum attained at q = 1, exactly (3 - sqrt5)/2
        assert Fraction(3819660112, 10**10) < lo <= hi < Fraction(3819660114, 10**10)

    def test_golden_tail_margin_window(self):
        recs = simul.enumerate_best_simul(GOLDEN, 10**4)
        tail = recs[len(recs) // 2 :]
        lo, hi = simul.badness_margin(tail, 1)
        assert Fraction(447, 1000) < lo <= hi < Fraction(448, 1000)
        # frozen: tail minimum is attained at q = 144
        assert Fraction(44720928, 10**8) < lo < Fraction(44720929, 10**8)

    def test_d2_margin_positive(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        lo, hi = simul.badness_margin(recs, 2)
        assert Fraction(121914, 10**7) < lo <= hi < Fraction(121916, 10**7)

    def test_empty(self):
        with pytest.raises(DomainError):
            simul.badness_margin([], 1)


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
    @settings(max_examples=25, deadline=None)
    @given(_SURDS, st.integers(20, 200))
    def test_oracle_equivalence_d1(self, surd, q_max):
        target = _vector_of(surd)
        recs = simul.enumerate_best_simul(target, q_max)
        orc = oracles.oracle_best_simul(target, q_max)
        assert [(r.q, r.a) for r in recs] == [(q, a) for q, a, _ in orc]

    @settings(max_examples=15, deadline=None)
    @given(_SURDS, st.integers(20, 150))
    def test_theorem_bounds_always_hold(self, surd, q_max):
        target = _vector_of(surd)
        recs = simul.enumerate_best_simul(target, q_max)
        if len(recs) < 2:
            return
        assert simul.check_minkowski_simul(recs).passed
        assert simul.check_two_dim_volume_bounds(recs, target).passed

    @settings(max_examples=10, deadline=None)
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
        recs = simul.enumerate_best_simul(target, 120)
        orc = oracles.oracle_best_simul(target, 120)
        assert [(r.q, r.a) for r in recs] == [(q, a) for q, a, _ in orc]
