"""One-dimensional continued fractions with exact remainder tracking.

Expands a real number into its regular continued fraction, keeping the
convergents (p, q) and the remainders xi_nu = |q_nu * alpha - p_nu| in
exact arithmetic whenever the input has an exact backend (rational or
quadratic surd).  Decimal-ball inputs are expanded by interval floor
steps and fail loudly once the enclosure is too wide to decide the next
partial quotient.

By Lagrange's theorem the convergents are exactly the best one-sided
approximations, so this module doubles as the d = 1 fast path of the
best-approximation enumerators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import DomainError, InsufficientDepth, UndecidablePrecision
from .exactcore import (
    CertifiedReal,
    ExactReal,
    QuadSurd,
    TargetCoordinate,
    ex_abs,
    ex_add,
    ex_div,
    ex_enclosure,
    ex_floor,
    ex_inv,
    ex_mul,
    ex_sign,
    ex_sub,
)

CFInput = Union[TargetCoordinate, CertifiedReal, Fraction, QuadSurd, int]


@dataclass(frozen=True)
class CFExpansion:
    """Regular continued fraction [a0; a1, a2, ...] with exact bookkeeping.

    convergents[nu] = (p_nu, q_nu) and remainders[nu] = |q_nu*alpha - p_nu|
    for nu = 0 .. len(partials).  signed_remainders carries the signed
    values q_nu*alpha - p_nu when the backend is exact, else None.
    termination is "budget" (ran out of requested terms) or "rational"
    (the expansion ended; the final partial quotient is then >= 2 by the
    canonical-form convention, which the floor algorithm yields for free).
    """

    a0: int
    partials: list[int]
    convergents: list[tuple[int, int]]
    remainders: list[CertifiedReal]
    signed_remainders: Optional[list[ExactReal]]
    termination: str

    def depth(self) -> int:
        return len(self.partials)

    def xi(self, nu: int) -> CertifiedReal:
        return self.remainders[nu]


@dataclass(frozen=True)
class PartialQuotientReport:
    """Outcome of re-deriving each partial quotient from q's and xi's."""

    passed: bool
    first_violation: Optional[int]
    failed_identity: Optional[str]
    checked: int
    undecided: bool = False


@dataclass(frozen=True)
class Prop1Report:
    """Finite-scale badly-approximable statistics of one expansion.

    sup_q_ratio is exact; inf_xi_ratio is a certified rational enclosure
    (lo, hi) of the minimum ratio xi_{nu+1}/xi_nu over the computed range.
    The arg tuples hold (numerator index, denominator index) into the
    stored convergent / remainder sequences.
    """

    sup_q_ratio: Fraction
    arg_sup_q_ratio: tuple[int, int]
    inf_xi_ratio: tuple[Fraction, Fraction]
    arg_inf_xi_ratio: tuple[int, int]
    sup_partial: int


def _as_backend(alpha: CFInput):
    """Normalize input to ("exact", value) or ("ball", (lo, hi))."""
    if isinstance(alpha, TargetCoordinate):
        if alpha.is_exact:
            return "exact", alpha.exact
        return "ball", (alpha.mid - alpha.radius, alpha.mid + alpha.radius)
    if isinstance(alpha, CertifiedReal):
        if alpha.exact is not None:
            return "exact", alpha.exact
        return "ball", (alpha.lo, alpha.hi)
    if isinstance(alpha, int):
        return "exact", Fraction(alpha)
    if isinstance(alpha, (Fraction, QuadSurd)):
        return "exact", alpha
    raise DomainError(f"unsupported continued fraction input: {type(alpha).__name__}")


def _expand_exact(x: ExactReal, n: int) -> CFExpansion:
    a0 = ex_floor(x)
    p_prev, q_prev = 1, 0
    p, q = a0, 1
    # Signed remainders D_nu = q_nu*alpha - p_nu; D_{-1} = -1, D_0 = alpha - a0.
    d_prev: ExactReal = Fraction(-1)
    d: ExactReal = ex_sub(x, Fraction(a0))
    partials: list[int] = []
    convergents = [(p, q)]
    signed: list[ExactReal] = [d]
    frac = d
    termination = "budget"
    while True:
        if ex_sign(frac) == 0:
            termination = "rational"
            break
        if len(partials) >= n:
            break
        cq = ex_inv(frac)
        a = ex_floor(cq)
        partials.append(a)
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        d, d_prev = ex_add(d_prev, ex_mul(d, Fraction(a))), d
        convergents.append((p, q))
        signed.append(d)
        frac = ex_sub(cq, Fraction(a))
    remainders = [CertifiedReal.from_exact(ex_abs(v)) for v in signed]
    return CFExpansion(a0, partials, convergents, remainders, signed, termination)


def _expand_ball(lo: Fraction, hi: Fraction, n: int) -> CFExpansion:
    a0 = _interval_floor(lo, hi, 0)
    p_prev, q_prev = 1, 0
    p, q = a0, 1
    dlo_prev, dhi_prev = Fraction(-1), Fraction(-1)
    dlo, dhi = lo - a0, hi - a0
    flo, fhi = dlo, dhi
    partials: list[int] = []
    convergents = [(p, q)]
    sign_intervals = [(dlo, dhi)]
    while len(partials) < n:
        if flo <= 0:
            raise UndecidablePrecision(
                "enclosure cannot certify a positive fractional part",
                context={"step": len(partials), "lo": str(flo), "hi": str(fhi)},
            )
        xlo, xhi = 1 / fhi, 1 / flo
        a = _interval_floor(xlo, xhi, len(partials) + 1)
        partials.append(a)
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        # Interval image of D_{nu+1} = D_{nu-1} + a * D_nu (a > 0, monotone).
        dlo, dlo_prev = dlo_prev + a * dlo, dlo
        dhi, dhi_prev = dhi_prev + a * dhi, dhi
        convergents.append((p, q))
        sign_intervals.append((dlo, dhi))
        flo, fhi = xlo - a, xhi - a
    remainders = []
    for slo, shi in sign_intervals:
        alo, ahi = _abs_interval(slo, shi)
        remainders.append(
            CertifiedReal.from_ball((alo + ahi) / 2, (ahi - alo) / 2)
        )
    return CFExpansion(a0, partials, convergents, remainders, None, "budget")


def _interval_floor(lo: Fraction, hi: Fraction, step: int) -> int:
    fl = lo.__floor__()
    if hi.__floor__() != fl:
        raise UndecidablePrecision(
            "enclosure too wide to decide a partial quotient",
            context={"step": step, "lo": str(lo), "hi": str(hi)},
        )
    return fl


def _abs_interval(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    if lo >= 0:
        return lo, hi
    if hi <= 0:
        return -hi, -lo
    return Fraction(0), max(-lo, hi)


def cf_expand(alpha: CFInput, n: int) -> CFExpansion:
    """First n partial quotients of alpha with convergents and remainders.

    Rational inputs terminate early with termination == "rational".
    Ball inputs raise UndecidablePrecision once the next floor cannot be
    decided from the enclosure.
    """
    if n < 0:
        raise DomainError("term count must be nonnegative")
    kind, payload = _as_backend(alpha)
    if kind == "exact":
        return _expand_exact(payload, n)
    lo, hi = payload
    return _expand_ball(lo, hi, n)


def _xi_ratio_floor_exact(num: ExactReal, den: ExactReal) -> int:
    return ex_floor(ex_div(num, den))


def partial_quotient_identities(exp: CFExpansion) -> PartialQuotientReport:
    """Re-derive every partial quotient two independent ways and compare.

    For each stored a_k the checks are floor(q_k / q_{k-1}) == a_k (skipped
    at the single degenerate index where q_{k-2} == q_{k-1}, which happens
    only when a_1 = 1) and floor(xi_{k-2} / xi_{k-1}) == a_k with the
    convention xi_{-1} = 1.  Pure check: never raises; an enclosure too
    wide to decide a floor is reported as undecided.
    """
    if exp.depth() < 1:
        raise InsufficientDepth("identity check needs at least one partial quotient")
    n = exp.depth()
    conv = exp.convergents
    exact = exp.signed_remainders is not None
    for k in range(1, n + 1):
        a_k = exp.partials[k - 1]
        q_k = conv[k][1]
        q_km1 = conv[k - 1][1]
        q_km2 = conv[k - 2][1] if k >= 2 else 0
        if q_km2 < q_km1:
            if q_k // q_km1 != a_k:
                return PartialQuotientReport(False, k, "q_ratio", k - 1)
        if exact:
            xi_km2: ExactReal = (
                ex_abs(exp.signed_remainders[k - 2]) if k >= 2 else Fraction(1)
            )
            xi_km1 = ex_abs(exp.signed_remainders[k - 1])
            if _xi_ratio_floor_exact(xi_km2, xi_km1) != a_k:
                return PartialQuotientReport(False, k, "xi_ratio", k - 1)
        else:
            nlo, nhi = (
                (exp.remainders[k - 2].lo, exp.remainders[k - 2].hi)
                if k >= 2
                else (Fraction(1), Fraction(1))
            )
            dlo, dhi = exp.remainders[k - 1].lo, exp.remainders[k - 1].hi
            if dlo <= 0:
                return PartialQuotientReport(False, k, "xi_ratio", k - 1, True)
            rlo, rhi = nlo / dhi, nhi / dlo
            fl, fh = rlo.__floor__(), rhi.__floor__()
            if fl != fh:
                return PartialQuotientReport(False, k, "xi_ratio", k - 1, True)
            if fl != a_k:
                return PartialQuotientReport(False, k, "xi_ratio", k - 1)
    return PartialQuotientReport(True, None, None, n)


def prop1_report(exp: CFExpansion, enclosure_bits: int = 64) -> Prop1Report:
    """Finite-scale sup q-ratio, inf xi-ratio, and sup partial quotient.

    sup_q_ratio is the exact maximum of q_{nu+1}/q_nu over consecutive
    stored convergents; inf_xi_ratio encloses the minimum xi_{nu+1}/xi_nu
    as a rational interval of width about 2**-enclosure_bits (exact
    backends) or the tightest sound interval (ball backends).

    When the expansion was cut by the term budget the final remainder
    ratio is excluded from the infimum: that ratio is determined by the
    first partial quotient beyond the computed range, so including it
    would let unseen terms leak into the finite-scale statistics.
    Terminated rational expansions keep their final (zero) ratio.
    """
    if exp.depth() < 1 or (exp.termination == "budget" and exp.depth() < 2):
        raise InsufficientDepth(
            "statistics need two terms, plus one spare partial for a cut expansion"
        )
    conv = exp.convergents
    sup_q = Fraction(conv[1][1], conv[0][1])
    arg_q = (1, 0)
    for nu in range(1, len(conv) - 1):
        r = Fraction(conv[nu + 1][1], conv[nu][1])
        if r > sup_q:
            sup_q = r
            arg_q = (nu + 1, nu)
    n_ratios = len(exp.remainders) - 1
    if exp.termination == "budget":
        n_ratios -= 1
    if exp.signed_remainders is not None:
        best: Optional[ExactReal] = None
        arg_xi = (1, 0)
        for nu in range(n_ratios):
            den = ex_abs(exp.signed_remainders[nu])
            num = ex_abs(exp.signed_remainders[nu + 1])
            if ex_sign(num) == 0:
                # Rational termination: final ratio is exactly zero.
                best = Fraction(0)
                arg_xi = (nu + 1, nu)
                break
            r = ex_div(num, den)
            if best is None or ex_sign(ex_sub(r, best)) < 0:
                best = r
                arg_xi = (nu + 1, nu)
        assert best is not None
        if isinstance(best, Fraction):
            lo, hi = best, best
        else:
            lo, hi = ex_enclosure(best, enclosure_bits)
    else:
        lo = hi = None
        arg_xi = (1, 0)
        for nu in range(n_ratios):
            dlo, dhi = exp.remainders[nu].lo, exp.remainders[nu].hi
            nlo, nhi = exp.remainders[nu + 1].lo, exp.remainders[nu + 1].hi
            if dlo <= 0:
                raise UndecidablePrecision(
                    "remainder enclosure touches zero; ratio undecidable",
                    context={"index": nu},
                )
            rlo, rhi = nlo / dhi, nhi / dlo
            if lo is None or rlo < lo:
                lo = rlo
                arg_xi = (nu + 1, nu)
            if hi is None or rhi < hi:
                hi = rhi
        assert lo is not None and hi is not None
    return Prop1Report(
        sup_q_ratio=sup_q,
        arg_sup_q_ratio=arg_q,
        inf_xi_ratio=(lo, hi),
        arg_inf_xi_ratio=arg_xi,
        sup_partial=max(exp.partials),
    )
