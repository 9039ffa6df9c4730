"""Exponent estimation, the growth-tradeoff root, and triple independence."""

from fractions import Fraction

import pytest

from bestapprox import exponents, simul
from bestapprox.errors import DomainError, NoIndependentTriple
from bestapprox.exactcore import parse_target_vector
from bestapprox.exponents import (
    LOW_CONFIDENCE_FLAG,
    ChainLink,
    ExponentReport,
    check_prop2,
    check_prop3,
    estimate_exponents,
    gd_residual,
    solve_Gd,
)

GOLDEN = parse_target_vector("surd:(1+1*sqrt(5))/2")
ROOT2_3 = parse_target_vector("surd:(0+1*sqrt(2))/1 - 1, surd:(0+1*sqrt(3))/1 - 1")
# continued fraction [0; 2, 2, 5, 27, 734]: each partial quotient equals the
# previous denominator, so q_{n+1} = q_n^2 + q_{n-1} (engineered growth)
CF_SQUARE = parse_target_vector("rat:219477/538783")


class TestSolveGd:
    def test_d2_closed_form_exact(self):
        assert solve_Gd(2, Fraction(1, 2)) == (Fraction(1), Fraction(1))
        assert solve_Gd(2, Fraction(2, 3)) == (Fraction(2), Fraction(2))

    def test_d2_grid_matches_closed_form(self):
        for k in range(1, 100):
            w = Fraction(k, 100)
            lo, hi = solve_Gd(2, w)
            assert lo == hi == w / (1 - w)

    def test_d3_half_is_golden_ratio(self):
        lo, hi = solve_Gd(3, Fraction(1, 2))
        assert hi - lo <= Fraction(1, 10**12)
        # (1 + sqrt 5)/2 inside: (2 lo - 1)^2 <= 5 <= (2 hi - 1)^2
        assert (2 * lo - 1) ** 2 <= 5 <= (2 * hi - 1) ** 2

    def test_residual_small_on_samples(self):
        for d in (3, 4, 5):
            for k in (1, 10, 37, 50, 73, 99):
                w = Fraction(k, 100)
                lo, hi = solve_Gd(d, w)
                mid = (lo + hi) / 2
                assert gd_residual(d, w, mid) < Fraction(1, 10**10)

    def test_monotone_in_omega_hat(self):
        prev = None
        for k in range(5, 100, 5):
            lo, hi = solve_Gd(3, Fraction(k, 100))
            mid = (lo + hi) / 2
            if prev is not None:
                assert mid > prev
            prev = mid

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            solve_Gd(1, Fraction(1, 2))
        with pytest.raises(DomainError):
            solve_Gd(2, Fraction(0))
        with pytest.raises(DomainError):
            solve_Gd(2, Fraction(1))
        with pytest.raises(DomainError):
            solve_Gd(3, Fraction(3, 2))


class TestEstimates:
    def test_golden_tail_estimates(self):
        recs = simul.enumerate_best_simul(GOLDEN, 10**4)
        rep = estimate_exponents(recs)
        assert rep.window == 9 and rep.n_ratios == 18
        assert Fraction("1.0650") < rep.omega_est < Fraction("1.0651")
        assert Fraction("1.0366") < rep.omega_hat_est < Fraction("1.0367")
        assert Fraction("1.107") < rep.tau_est < Fraction("1.108")
        assert Fraction("1.5849") < rep.tau_range[1] < Fraction("1.585")
        assert Fraction("1.3884") < rep.omega_range[1] < Fraction("1.3885")
        assert rep.flags == ()

    def test_d2_fixture_estimates(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        rep = estimate_exponents(recs)
        assert Fraction("0.5886") < rep.omega_est < Fraction("0.5887")
        assert Fraction("0.5649") < rep.omega_hat_est < Fraction("0.5650")
        assert Fraction("1.905") < rep.tau_est < Fraction("1.906")
        lo, hi = rep.g_d_value
        assert lo == hi
        assert Fraction("1.2986") < lo < Fraction("1.2987")

    def test_engineered_square_growth(self):
        # beta = 2 engineering: every tau ratio near 2, omega proxies near 1
        recs = simul.enumerate_best_simul(CF_SQUARE, 10**5)
        assert [r.q for r in recs] == [1, 2, 5, 27, 734]
        rep = estimate_exponents(recs)
        assert Fraction("2.002") < rep.tau_range[0] < Fraction("2.003")
        assert Fraction("2.3219") < rep.tau_range[1] < Fraction("2.322")
        assert Fraction("2.047") < rep.tau_est < Fraction("2.048")
        assert Fraction("1.0000") < rep.omega_hat_est < Fraction("1.0001")
        assert Fraction("1.002") < rep.omega_est < Fraction("1.003")
        assert rep.g_d_value is None

    def test_two_term_low_confidence(self):
        recs = simul.enumerate_best_simul(GOLDEN, 2)
        rep = estimate_exponents(recs)
        assert rep.n_ratios == 1
        assert LOW_CONFIDENCE_FLAG in rep.flags
        assert rep.tau_est == 1

    def test_explicit_window(self):
        recs = simul.enumerate_best_simul(GOLDEN, 10**4)
        rep = estimate_exponents(recs, window=3)
        assert rep.window == 3
        rep_all = estimate_exponents(recs, window=999)
        assert rep_all.window == rep_all.n_ratios
        assert rep_all.omega_est == rep_all.omega_range[1]

    def test_single_record_rejected(self):
        recs = simul.enumerate_best_simul(GOLDEN, 1)
        with pytest.raises(DomainError):
            estimate_exponents(recs)


class TestProp2:
    def test_d2_fixture_triples(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        rep = check_prop2(recs)
        assert len(rep.independent) == 6
        assert rep.dependent == (7, 8)
        assert rep.bound.passed
        first = rep.independent[0]
        assert (first.nu, first.pair, first.det) == (1, (1, 2), 1)
        assert [w.det for w in rep.independent] == [1, 1, -1, -1, -1, -1]

    def test_coplanar_stretch_is_real(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        v6, v7, v8, v9 = (recs[i].vec for i in (6, 7, 8, 9))
        assert tuple(a + b for a, b in zip(v6, v7)) == v8
        assert tuple(a + b for a, b in zip(v7, v8)) == v9

    def test_d1_rejected(self):
        recs = simul.enumerate_best_simul(GOLDEN, 100)
        with pytest.raises(NoIndependentTriple):
            check_prop2(recs)

    def test_short_sequence_rejected(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 5)
        with pytest.raises(NoIndependentTriple):
            check_prop2(recs[:2])


class TestProp3:
    def _report(self, omega, omega_hat, tau, d=2):
        return ExponentReport(
            omega_est=Fraction(omega),
            omega_hat_est=Fraction(omega_hat),
            tau_est=Fraction(tau),
            omega_range=(Fraction(omega_hat), Fraction(omega)),
            tau_range=(Fraction(1), Fraction(tau)),
            g_d_value=None,
            d=d,
            window=1,
            n_ratios=1,
            flags=(),
        )

    def test_badly_approximable_profile_all_hold(self):
        # omega = omega_hat = 1/d, tau = 1: every link is an equality
        rep = check_prop3(self._report(Fraction(1, 2), Fraction(1, 2), 1), 2)
        assert rep.all_hold
        assert [link.holds for link in rep.links] == [True] * 4
        assert rep.links[0].lhs == 1 and rep.links[0].rhs == 1
        assert rep.links[3].lhs == Fraction(1, 2)
        assert rep.links[3].rhs == Fraction(1, 2)

    def test_synthesized_profile_chain(self):
        # omega ~ 1, omega_hat ~ 1/2, tau ~ 2: chain reads 1 <= 2 <= 2 <= 2
        rep = check_prop3(self._report(1, Fraction(1, 2), 2), 2)
        assert rep.all_hold
        vals = [(link.lhs, link.rhs) for link in rep.links]
        assert vals[0] == (1, 2)
        assert vals[1] == (2, 2)
        assert vals[2] == (2, 2)
        assert vals[3] == (Fraction(1, 2), Fraction(2, 3))

    def test_fault_injected_link_flagged(self):
        # tau above omega/omega_hat must fail the second link
        rep = check_prop3(self._report(Fraction(1, 2), Fraction(1, 2), 3), 2)
        assert not rep.all_hold
        assert not rep.links[1].holds
        assert rep.links[1].name == "tau-below-exponent-ratio"

    def test_fixture_fails_at_scale_honestly(self):
        recs = simul.enumerate_best_simul(ROOT2_3, 10**4)
        rep = check_prop3(estimate_exponents(recs), 2)
        assert not rep.links[1].holds
        assert rep.links[0].holds
        assert rep.links[3].holds

    def test_d1_rejected(self):
        with pytest.raises(DomainError):
            check_prop3(self._report(1, Fraction(1, 2), 2), 1)
