"""Exact core: surd arithmetic, certified comparisons, lattice volumes."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bestapprox.errors import DependentInput, DomainError
from bestapprox.exactcore import (
    CertifiedReal,
    Ordering,
    QuadSurd,
    certified_compare,
    completed_volume_sq,
    cross3,
    ex_compare,
    ex_enclosure,
    ex_floor,
    ex_mul,
    ex_nearest_int,
    ex_sign,
    ex_sub,
    fundamental_volume_sq,
    is_complete,
    minors2,
    parse_target,
    parse_target_vector,
    squarefree_split,
)

SQRT2 = QuadSurd(0, 1, 1, 2)
SQRT3 = QuadSurd(0, 1, 1, 3)
GOLDEN = QuadSurd(1, 1, 2, 5)


def gram_volume_sq(v0, v1):
    """Independent oracle: |v0|^2 |v1|^2 - (v0.v1)^2."""
    dot = sum(a * b for a, b in zip(v0, v1))
    n0 = sum(a * a for a in v0)
    n1 = sum(b * b for b in v1)
    return n0 * n1 - dot * dot


class TestSurd:
    def test_normalization_extracts_square_factors(self):
        assert squarefree_split(8) == (2, 2)
        assert squarefree_split(2) == (1, 2)
        assert squarefree_split(12) == (2, 3)
        # sqrt(8) = 2 sqrt(2): both spellings are the same field element
        assert QuadSurd(0, 1, 1, 8) == QuadSurd(0, 2, 1, 2)

    def test_perfect_square_radicand_rejected(self):
        with pytest.raises(DomainError):
            QuadSurd(0, 1, 1, 9)

    def test_sign_mixed_terms(self):
        assert ex_sign(QuadSurd(-1, 1, 1, 2)) == 1  # sqrt(2) - 1 > 0
        assert ex_sign(QuadSurd(-3, 2, 1, 2)) == -1  # 2 sqrt(2) < 3
        assert ex_sign(QuadSurd(3, -2, 1, 2)) == 1
        assert ex_sign(QuadSurd(1, 1, 1, 2)) == 1
        assert ex_sign(QuadSurd(-1, -1, 1, 2)) == -1

    def test_floor_values(self):
        assert ex_floor(SQRT2) == 1
        assert ex_floor(QuadSurd(0, -1, 1, 2)) == -2
        assert ex_floor(GOLDEN) == 1
        assert ex_floor(QuadSurd(0, 1, 1, 99)) == 9
        assert ex_floor(Fraction(-7, 2)) == -4

    def test_field_arithmetic_closes(self):
        x = ex_mul(SQRT2, SQRT2)
        assert x == Fraction(2)
        y = ex_sub(QuadSurd(0, 1, 1, 2), QuadSurd(1, 1, 1, 2))
        assert y == Fraction(-1)
        z = ex_mul(QuadSurd(-1, 1, 1, 2), QuadSurd(1, 1, 1, 2))
        assert z == Fraction(1)  # (sqrt2-1)(sqrt2+1)

    def test_nearest_int_tie_flag(self):
        m, tie = ex_nearest_int(Fraction(7, 2))
        assert tie and m == 4
        m, tie = ex_nearest_int(Fraction(1, 3))
        assert not tie and m == 0
        m, tie = ex_nearest_int(SQRT2)
        assert not tie and m == 1

    @given(st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 30),
           st.sampled_from([2, 3, 5, 6, 7, 10]))
    def test_enclosure_brackets_value(self, a, b, c, d_rad):
        if b == 0:
            return
        x = QuadSurd(a, b, c, d_rad)
        lo, hi = ex_enclosure(x, 40)
        assert hi - lo <= Fraction(1, 2**40)
        # certificate: lo <= x <= hi decided exactly in the field
        assert ex_compare(x, lo) >= 0
        assert ex_compare(x, hi) <= 0

    @given(st.integers(-30, 30), st.integers(-30, 30), st.integers(1, 20))
    def test_floor_agrees_with_enclosure(self, a, b, c):
        if b == 0:
            return
        x = QuadSurd(a, b, c, 2)
        f = ex_floor(x)
        assert ex_compare(x, Fraction(f)) >= 0
        assert ex_compare(x, Fraction(f + 1)) < 0


class TestCertifiedCompare:
    def test_surd_vs_rational_greater(self):
        a = CertifiedReal.from_exact(SQRT2)
        b = CertifiedReal.from_exact(Fraction(7, 5))
        assert certified_compare(a, b, Fraction(1, 10**6)) is Ordering.GREATER

    def test_equal_rationals(self):
        a = CertifiedReal.from_exact(Fraction(3, 7))
        b = CertifiedReal.from_exact(Fraction(3, 7))
        assert certified_compare(a, b, Fraction(1, 10**6)) is Ordering.EQUAL

    def test_ball_tie_undecided(self):
        a = CertifiedReal.from_exact(SQRT2)
        b = CertifiedReal.from_ball(Fraction("1.41421356"), Fraction(1, 10**8))
        out = certified_compare(a, b, Fraction(1, 10**4))
        assert out is Ordering.TIE_UNDECIDED

    def test_cross_field_separates(self):
        a = CertifiedReal.from_exact(SQRT2)
        b = CertifiedReal.from_exact(SQRT3)
        assert certified_compare(a, b, Fraction(1, 10**9)) is Ordering.LESS

    def test_interval_products_refine(self):
        # (sqrt2)(sqrt3) lies strictly between 2.449 and 2.450
        prod = CertifiedReal.from_exact(SQRT2) * CertifiedReal.from_exact(SQRT3)
        prod.refine_to(Fraction(1, 10**9))
        assert Fraction("2.449") < prod.lo <= prod.hi < Fraction("2.450")

    def test_antisymmetry(self):
        a = CertifiedReal.from_exact(GOLDEN)
        b = CertifiedReal.from_exact(Fraction(8, 5))
        w = Fraction(1, 10**9)
        assert certified_compare(a, b, w) is Ordering.GREATER
        assert certified_compare(b, a, w) is Ordering.LESS

    def test_max_of_cross_field(self):
        m = CertifiedReal.max_of(
            [CertifiedReal.from_exact(SQRT2), CertifiedReal.from_exact(SQRT3)]
        )
        assert certified_compare(m, CertifiedReal.from_exact(SQRT3), Fraction(1, 10**9)) is Ordering.EQUAL


class TestVolumes:
    def test_pinned_values(self):
        assert fundamental_volume_sq((1, 0, 0), (0, 1, 0)) == 1
        assert fundamental_volume_sq((2, 0, 0), (0, 2, 0)) == 16
        assert fundamental_volume_sq((1, 1, 0), (2, 1, 1)) == 3

    def test_gram_oracle_agrees(self):
        cases = [((1, 0, 0), (0, 1, 0)), ((2, 0, 0), (0, 2, 0)), ((1, 1, 0), (2, 1, 1)),
                 ((5, 2, 0), (22, 9, 0)), ((3, -1, 4), (2, 7, 1))]
        for v0, v1 in cases:
            assert fundamental_volume_sq(v0, v1) == gram_volume_sq(v0, v1)

    @given(st.tuples(*[st.integers(-40, 40)] * 3), st.tuples(*[st.integers(-40, 40)] * 3))
    def test_gram_identity_random(self, v0, v1):
        g = gram_volume_sq(v0, v1)
        if g == 0:
            with pytest.raises(DependentInput):
                fundamental_volume_sq(v0, v1)
        else:
            assert fundamental_volume_sq(v0, v1) == g

    @given(st.tuples(*[st.integers(-20, 20)] * 3), st.tuples(*[st.integers(-20, 20)] * 3),
           st.integers(-5, 5))
    def test_unimodular_invariance(self, v0, v1, k):
        g = gram_volume_sq(v0, v1)
        if g == 0:
            return
        shifted = tuple(a + k * b for a, b in zip(v1, v0))
        if gram_volume_sq(v0, shifted) == 0:
            return
        assert fundamental_volume_sq(v0, v1) == fundamental_volume_sq(v1, v0)
        assert fundamental_volume_sq(v0, shifted) == fundamental_volume_sq(v0, v1)

    def test_completeness(self):
        assert is_complete((1, 0, 0), (0, 1, 0)) is True
        assert is_complete((2, 0, 0), (0, 2, 0)) is False
        assert is_complete((1, 1, 0), (2, 1, 1)) is True
        assert minors2((1, 1, 0), (2, 1, 1)) == (-1, 1, 1)

    def test_completed_volume(self):
        # index-4 sublattice: completion recovers the unit cell
        assert completed_volume_sq((2, 0, 0), (0, 2, 0)) == 1
        assert completed_volume_sq((1, 1, 0), (2, 1, 1)) == 3

    def test_dependent_input(self):
        with pytest.raises(DependentInput):
            fundamental_volume_sq((1, 2, 3), (2, 4, 6))

    def test_cross3_matches_minors(self):
        v0, v1 = (5, 2, 0), (22, 9, 0)
        c = cross3(v0, v1)
        assert sum(x * x for x in c) == fundamental_volume_sq(v0, v1)


class TestTargets:
    def test_rat(self):
        t = parse_target("rat:22/7")
        assert t.exact == Fraction(22, 7)

    def test_surd_with_shift(self):
        t = parse_target("surd:(0+1*sqrt(2))/1 - 1")
        assert t.exact == QuadSurd(-1, 1, 1, 2)
        assert ex_sign(t.exact) == 1

    def test_dec_ball(self):
        t = parse_target("dec:1.41421356~1e-8")
        assert not t.is_exact
        assert t.mid == Fraction("1.41421356")
        assert t.radius == Fraction(1, 10**8)

    def test_vector(self):
        v = parse_target_vector("surd:(0+1*sqrt(2))/1 - 1, surd:(0+1*sqrt(3))/1 - 1")
        assert v.d == 2 and v.is_exact

    def test_bad_spec_rejected(self):
        with pytest.raises(DomainError):
            parse_target("surd:sqrt(2)")
        with pytest.raises(DomainError):
            parse_target("foo:1")

    def test_golden_spec(self):
        t = parse_target("surd:(1+1*sqrt(5))/2")
        assert t.exact == GOLDEN
