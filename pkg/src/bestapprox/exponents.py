"""Diophantine exponent estimates and the growth-tradeoff root.

Finite-scale proxies only: the exponent of a record sequence is estimated
from log-ratio statistics over a tail window, never claimed as a limit.
Logarithms are enclosed in exact rational intervals; the tradeoff root
G_d is bracketed by bisection on an exact rational polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .errors import (
    DomainError,
    InternalCertificateFailure,
    NoIndependentTriple,
    UndecidablePrecision,
)
from .exactcore import CertifiedReal, Ordering, certified_compare, det_int, int_rank
from .ratlog import Interval, div_enclosure, ln_enclosure, round_dyadic
from .report import BoundReport
from .simul import ApproxVector

_LOG_BITS = 64
_EST_BITS = 64
_CMP_WIDTH = Fraction(1, 1 << 192)
_ROOT_WIDTH = Fraction(1, 10**12)

LOW_CONFIDENCE_FLAG = "low-confidence"
OMEGA_HAT_FLOOR_FLAG = "omega-hat-below-1/d"


@dataclass(frozen=True)
class ExponentReport:
    """Tail-windowed exponent estimates with full-range extremes attached."""

    omega_est: Fraction
    omega_hat_est: Fraction
    tau_est: Fraction
    omega_range: tuple[Fraction, Fraction]
    tau_range: tuple[Fraction, Fraction]
    g_d_value: Optional[tuple[Fraction, Fraction]]
    d: int
    window: int
    n_ratios: int
    flags: tuple[str, ...]


@dataclass(frozen=True)
class TripleWitness:
    """Independent consecutive record triple with its certifying minor."""

    nu: int
    pair: tuple[int, int]
    det: int


@dataclass(frozen=True)
class Prop2Report:
    independent: tuple[TripleWitness, ...]
    dependent: tuple[int, ...]
    bound: BoundReport


@dataclass(frozen=True)
class ChainLink:
    name: str
    lhs: Fraction
    rhs: Fraction
    holds: bool


@dataclass(frozen=True)
class Prop3Report:
    links: tuple[ChainLink, ...]
    all_hold: bool


def solve_Gd(d: int, omega_hat: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of the positive root of t^(d-1) = r (1 + t + ... + t^(d-2))
    with r = omega_hat / (1 - omega_hat); width at most 10^-12."""
    if d < 2:
        raise DomainError("d must be >= 2")
    omega_hat = Fraction(omega_hat)
    if not 0 < omega_hat < 1:
        raise DomainError("omega_hat must lie in (0, 1)")
    r = omega_hat / (1 - omega_hat)
    if d == 2:
        return r, r

    def poly(t: Fraction) -> Fraction:
        return t ** (d - 1) - r * sum((t**j for j in range(d - 1)), Fraction(0))

    lo, hi = Fraction(0), Fraction(1)
    while poly(hi) <= 0:
        lo, hi = hi, hi * 2
    # stop on width AND midpoint residual, so steep roots stay accurate
    res_cap = Fraction(1, 10**11)
    for _ in range(400):
        mid = (lo + hi) / 2
        s = poly(mid)
        if s == 0:
            return mid, mid
        if hi - lo <= _ROOT_WIDTH and abs(s) < res_cap:
            break
        if s > 0:
            hi = mid
        else:
            lo = mid
    return lo, hi


def gd_residual(d: int, omega_hat: Fraction, t: Fraction) -> Fraction:
    """|t^(d-1) - r (1 + ... + t^(d-2))| at a candidate root, exact."""
    r = Fraction(omega_hat) / (1 - Fraction(omega_hat))
    return abs(t ** (d - 1) - r * sum((t**j for j in range(d - 1)), Fraction(0)))


def _positive_log(x: CertifiedReal, what: str) -> Interval:
    """Enclosure of ln(x) for a certifiably positive x."""
    width = Fraction(1, 1 << 80)
    x.refine_to(width)
    while x.lo <= 0:
        width /= 1 << 64
        x.refine_to(width)
        if width < Fraction(1, 1 << 1200):
            raise UndecidablePrecision(f"cannot bound {what} away from zero")
    return ln_enclosure(x.lo, _LOG_BITS)[0], ln_enclosure(x.hi, _LOG_BITS)[1]


def _mid(iv: Interval) -> Fraction:
    return round_dyadic((iv[0] + iv[1]) / 2, _EST_BITS)


def estimate_exponents(
    seq: list[ApproxVector], window: Optional[int] = None
) -> ExponentReport:
    """Log-ratio exponent proxies over a record sequence.

    omega proxies: -log xi_nu / log q_{nu+1}; tau proxies:
    log q_{nu+1} / log q_nu (pairs with q_nu = 1 are skipped; exact-zero
    remainders end the proxy list). The *_est fields are tail-window
    statistics; full-range extremes ride along for context.
    """
    if len(seq) < 2:
        raise DomainError("need at least 2 records")
    d = len(seq[0].a)
    proxies: list[Fraction] = []
    taus: list[Fraction] = []
    for prev, nxt in zip(seq, seq[1:]):
        if prev.xi.exact is not None and prev.xi.exact == 0:
            break
        log_xi = _positive_log(prev.xi, f"remainder at q = {prev.q}")
        log_q = ln_enclosure(Fraction(nxt.q), _LOG_BITS)
        proxies.append(_mid(div_enclosure((-log_xi[1], -log_xi[0]), log_q)))
    for prev, nxt in zip(seq, seq[1:]):
        if prev.q < 2:
            continue
        num = ln_enclosure(Fraction(nxt.q), _LOG_BITS)
        den = ln_enclosure(Fraction(prev.q), _LOG_BITS)
        taus.append(max(_mid(div_enclosure(num, den)), Fraction(1)))
    if not proxies:
        raise DomainError("no usable remainder ratios")
    n_ratios = len(proxies)
    if window is None:
        window = max(1, n_ratios // 2)
    window = min(window, n_ratios)
    tail = proxies[-window:]
    tau_tail = taus[-window:] if taus else [Fraction(1)]
    omega_est = max(tail)
    omega_hat_est = min(tail)
    tau_est = max(tau_tail)
    flags: list[str] = []
    if n_ratios < 3 or not taus:
        flags.append(LOW_CONFIDENCE_FLAG)
    if omega_hat_est < Fraction(1, d):
        flags.append(OMEGA_HAT_FLOOR_FLAG)
    g_d: Optional[tuple[Fraction, Fraction]] = None
    if d >= 2 and 0 < omega_hat_est < 1:
        g_d = solve_Gd(d, omega_hat_est)
    return ExponentReport(
        omega_est=omega_est,
        omega_hat_est=omega_hat_est,
        tau_est=tau_est,
        omega_range=(min(proxies), max(proxies)),
        tau_range=(min(taus), max(taus)) if taus else (Fraction(1), Fraction(1)),
        g_d_value=g_d,
        d=d,
        window=window,
        n_ratios=n_ratios,
        flags=tuple(flags),
    )


def check_prop2(seq: list[ApproxVector]) -> Prop2Report:
    """Independent consecutive triples and their determinant bound.

    For every triple of consecutive records with full rank 3, finds the
    lexicographically first coordinate pair (j1, j2) whose 3x3 minor with
    the denominator column is nonzero, then certifies
    1 <= |D| <= 6 xi_{nu-1} xi_nu q_{nu+1}.
    """
    if not seq:
        raise NoIndependentTriple("empty sequence")
    d = len(seq[0].a)
    if d < 2:
        raise NoIndependentTriple("dimension too small for independent triples")
    if len(seq) < 3:
        raise NoIndependentTriple("need at least 3 records")
    independent: list[TripleWitness] = []
    dependent: list[int] = []
    name = "independent-triple-determinant-bound"
    first_violation: Optional[int] = None
    for nu in range(1, len(seq) - 1):
        triple = [seq[nu - 1], seq[nu], seq[nu + 1]]
        rows = [rec.vec for rec in triple]
        if int_rank(rows) < 3:
            dependent.append(nu)
            continue
        witness = None
        for j1, j2 in combinations(range(1, d + 1), 2):
            det = det_int([[row[0], row[j1], row[j2]] for row in rows])
            if det != 0:
                witness = TripleWitness(nu, (j1, j2), det)
                break
        if witness is None:
            raise InternalCertificateFailure(
                "independent-triple-projection",
                f"rank-3 triple at nu = {nu} has no nonzero denominator minor",
            )
        independent.append(witness)
        lhs = CertifiedReal.from_exact(Fraction(abs(witness.det)))
        rhs = (triple[0].xi * triple[1].xi).scaled(Fraction(6 * triple[2].q))
        out = certified_compare(lhs, rhs, _CMP_WIDTH)
        if out is Ordering.TIE_UNDECIDED:
            raise UndecidablePrecision(context=name)
        if out is Ordering.GREATER and first_violation is None:
            first_violation = nu
    if not independent:
        raise NoIndependentTriple("no independent consecutive triple in range")
    bound = BoundReport(name, len(independent), first_violation is None, first_violation)
    return Prop2Report(tuple(independent), tuple(dependent), bound)


_AT_SCALE_SLACK = Fraction(1, 64)
"""Relative tolerance for chain verdicts.  Several links are equalities
for the limiting exponents, so tail-window estimates straddle them by
windowing noise; a genuine violation overshoots by far more than 1/64."""


def _holds_at_scale(lhs: Fraction, rhs: Fraction) -> bool:
    return lhs <= rhs * (1 + _AT_SCALE_SLACK)


def check_prop3(report: ExponentReport, d: int) -> Prop3Report:
    """Inequality chain between the estimates: growth root <= tau <=
    omega/omega_hat <= d*omega, and omega_hat <= 1/(sum tau^-j).
    Estimates only; each link records its two sides exactly and a verdict
    at scale (relative tolerance ``_AT_SCALE_SLACK``)."""
    if d < 2:
        raise DomainError("d must be >= 2")
    omega, omega_hat, tau = report.omega_est, report.omega_hat_est, report.tau_est
    if not 0 < omega_hat < 1:
        raise DomainError("omega_hat estimate outside (0, 1)")
    g = report.g_d_value if report.g_d_value is not None else solve_Gd(d, omega_hat)
    g_mid = (g[0] + g[1]) / 2
    ratio = omega / omega_hat
    harmonic = 1 / sum((tau**-j for j in range(d)), Fraction(0))
    links = (
        ChainLink("growth-root-below-tau", g_mid, tau, _holds_at_scale(g_mid, tau)),
        ChainLink("tau-below-exponent-ratio", tau, ratio, _holds_at_scale(tau, ratio)),
        ChainLink(
            "exponent-ratio-below-d-omega",
            ratio,
            d * omega,
            _holds_at_scale(ratio, d * omega),
        ),
        ChainLink(
            "omega-hat-below-harmonic-tau",
            omega_hat,
            harmonic,
            _holds_at_scale(omega_hat, harmonic),
        ),
    )
    return Prop3Report(links, all(link.holds for link in links))
