"""Best approximations for the linear form |m_0 + m_1 a_1 + ... + m_d a_d|.

Shell scan over heights with the same fixed-point-prefilter/exact-adjudication
split as the simultaneous enumerator, plus the reversal transform: records of
the form, pushed through the unimodular scaling diag(T^-d, T, ..., T), become
simultaneous-style records of the scaled lattice with the roles of height and
value exchanged. The transform's outputs carry certificates for the plane
product bound's hypotheses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby
from typing import Optional, Sequence

from . import scanker
from .errors import (
    DomainError,
    InternalCertificateFailure,
    PreconditionViolated,
    TieDetected,
    UndecidablePrecision,
)
from .exactcore import (
    CertifiedReal,
    IntVec,
    Ordering,
    certified_compare,
    ex_compare,
    ex_floor,
    ex_sub,
    int_rank,
    minors2,
)
from .exactcore.targets import TargetVector
from .report import BoundReport
from .simul import badness_margin, enumerate_best_simul, _fixedpoint_setup

_CMP_WIDTH = Fraction(1, 1 << 192)
_MARGIN_WIDTH = Fraction(1, 1 << 96)
_HALF = Fraction(1, 2)
_ONE = CertifiedReal.from_exact(Fraction(1))


@dataclass(frozen=True)
class LinFormVector:
    """One linear-form record: coefficients m, height M, value L = |signed form|."""

    m: tuple[int, ...]
    M: int
    L: CertifiedReal
    sign: int = 1

    @property
    def mbar(self) -> tuple[int, ...]:
        return self.m[1:]


@dataclass(frozen=True)
class ScaledLattice:
    """Unimodular scaling diag(T^-d, T, ..., T) applied to the form lattice."""

    T: Fraction
    d: int

    @property
    def diagonal(self) -> tuple[Fraction, ...]:
        return (self.T**-self.d, *([self.T] * self.d))

    @property
    def det(self) -> Fraction:
        out = Fraction(1)
        for x in self.diagonal:
            out *= x
        return out


@dataclass(frozen=True)
class ReversedRecord:
    """A record of the scaled lattice: growing first coordinate z0, shrinking
    rational tail zbar; m_source is the originating integer coefficient
    vector after sign normalization."""

    z0: CertifiedReal
    zbar: tuple[Fraction, ...]
    m_source: Optional[IntVec] = None


@dataclass(frozen=True)
class CriteriaReport:
    """Finite-scale statistics for the boundedness criteria."""

    sup_q_ratio: Fraction
    inf_l_ratio: tuple[Fraction, Fraction]
    inf_xi_ratio: tuple[Fraction, Fraction]
    sup_m_ratio: Fraction
    margin_simul: tuple[Fraction, Fraction]
    margin_linform: tuple[Fraction, Fraction]
    n_simul: int
    n_linform: int
    flags: tuple[str, ...]


def _form_value(alpha: TargetVector, mbar: Sequence[int]) -> CertifiedReal:
    total: Optional[CertifiedReal] = None
    for m, coord in zip(mbar, alpha.coords, strict=True):
        term = coord.certified.scaled(Fraction(m))
        total = term if total is None else total + term
    assert total is not None
    return total


def _nearest_certified(
    s: CertifiedReal, where: str
) -> tuple[int, CertifiedReal, CertifiedReal]:
    """(nearest integer n, signed s - n, |s - n|); exact half-integers raise
    TieDetected."""
    if s.exact is not None:
        f = ex_floor(s.exact)
        fr = ex_sub(s.exact, Fraction(f))
        c = ex_compare(fr, _HALF)
        if c == 0:
            raise TieDetected(f"half-integer form value at {where}")
        n = f if c < 0 else f + 1
    else:
        n = (s + CertifiedReal.from_exact(_HALF)).floor()
    inner = s - CertifiedReal.from_exact(Fraction(n))
    return n, inner, inner.abs_()


def enumerate_best_linform(alpha: TargetVector, m_max: int) -> list[LinFormVector]:
    """Complete ordered record list with heights <= m_max."""
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    d = alpha.d
    scaled, one, _bits, err_per_unit = _fixedpoint_setup(alpha, d * m_max)
    slack_per_m = d * err_per_unit + 1
    candidates = scanker.linform_candidates(scaled, one, m_max, slack_per_m, 2)
    records: list[LinFormVector] = []
    best: Optional[CertifiedReal] = None
    best_height = 0
    for height, group in groupby(candidates, key=lambda v: max(abs(c) for c in v)):
        shell_best: Optional[
            tuple[tuple[int, ...], int, CertifiedReal, CertifiedReal]
        ] = None
        shell_tie = False
        for mbar in group:
            s = _form_value(alpha, mbar)
            n, inner, value = _nearest_certified(s, f"height {height}, m={mbar}")
            if shell_best is None:
                shell_best = (mbar, -n, inner, value)
                continue
            out = certified_compare(value, shell_best[3], _CMP_WIDTH)
            if out is Ordering.LESS:
                shell_best, shell_tie = (mbar, -n, inner, value), False
            elif out is Ordering.EQUAL:
                shell_tie = True
            elif out is Ordering.TIE_UNDECIDED:
                raise UndecidablePrecision(
                    f"cannot separate form values at height {height}",
                    context="enumerate_best_linform",
                )
        assert shell_best is not None
        mbar, m0, inner, value = shell_best
        if best is None:
            out = Ordering.LESS
        else:
            out = certified_compare(value, best, _CMP_WIDTH)
        if out is Ordering.LESS:
            if shell_tie:
                raise TieDetected(f"equal form values within height {height}")
            records.append(LinFormVector((m0, *mbar), height, value, inner.sign()))
            best, best_height = value, height
        elif out is Ordering.EQUAL:
            raise TieDetected(
                f"form value at height {height} ties the record at height {best_height}"
            )
        elif out is Ordering.TIE_UNDECIDED:
            raise UndecidablePrecision(
                f"cannot separate heights {best_height} and {height}",
                context="enumerate_best_linform",
            )
    return records


def check_minkowski_linform(seq: list[LinFormVector]) -> BoundReport:
    """Certifies L_nu * M_{nu+1}^d <= 1 on consecutive pairs."""
    if len(seq) < 2:
        raise DomainError("need at least 2 records")
    d = len(seq[0].m) - 1
    for nu in range(len(seq) - 1):
        lhs = seq[nu].L.scaled(Fraction(seq[nu + 1].M ** d))
        out = certified_compare(lhs, _ONE, _CMP_WIDTH)
        if out is Ordering.TIE_UNDECIDED:
            raise UndecidablePrecision(context="minkowski-linear-form")
        if out is Ordering.GREATER:
            return BoundReport("minkowski-linear-form", nu + 1, False, nu)
    return BoundReport("minkowski-linear-form", len(seq) - 1, True)


def linform_margin(seq: list[LinFormVector], d: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of min_nu L_nu * M_nu^d over the sequence."""
    if not seq:
        raise DomainError("empty sequence")
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for rec in seq:
        t = rec.L.scaled(Fraction(rec.M**d))
        t.refine_to(_MARGIN_WIDTH)
        lo = t.lo if lo is None else min(lo, t.lo)
        hi = t.hi if hi is None else min(hi, t.hi)
    assert lo is not None and hi is not None
    return lo, hi


def span_rank_tail(seq: list[LinFormVector], k: int) -> int:
    """Rank of the span of the last k coefficient vectors (diagnostics)."""
    if k <= 0:
        return 0
    return int_rank([rec.m for rec in seq[-k:]])


def _inf_ratio_enclosure(
    values: list[CertifiedReal],
) -> tuple[Fraction, Fraction]:
    """Enclosure of min_j values[j+1]/values[j] for positive values."""
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for a, b in zip(values, values[1:]):
        for v in (a, b):
            v.refine_to(_MARGIN_WIDTH)
            if v.lo <= 0:
                v.refine_to(Fraction(1, 1 << 160))
        rlo = b.lo / a.hi
        rhi = b.hi / a.lo
        lo = rlo if lo is None else min(lo, rlo)
        hi = rhi if hi is None else min(hi, rhi)
    assert lo is not None and hi is not None
    return lo, hi


CONSISTENT_FLAG = "consistent with badly approximable at this scale"
VIOLATED_FLAG = "criterion (ii) violated at observed scale"


def _ratio_growth_detected(ratios: list[Fraction]) -> bool:
    """True when the running maximum of the ratios is broken repeatedly with
    amplification: the last three distinct maxima each at least double the
    one before. A single large jump does not count as growth."""
    maxima: list[Fraction] = []
    for r in ratios:
        if not maxima or r > maxima[-1]:
            maxima.append(r)
    return len(maxima) >= 3 and maxima[-1] >= 2 * maxima[-2] >= 4 * maxima[-3]


def theorem1_criteria(alpha: TargetVector, q_max: int, m_max: int) -> CriteriaReport:
    """Finite-scale statistics for the three boundedness criteria.

    The flag rule detects growth of the denominator ratios across the range:
    repeated amplifying breaks of the running maximum mark the sequence as
    inconsistent with bounded ratios at this scale.
    """
    simul_seq = enumerate_best_simul(alpha, q_max)
    lin_seq = enumerate_best_linform(alpha, m_max)
    if len(simul_seq) < 2 or len(lin_seq) < 2:
        raise DomainError("need at least 2 records on both sides")
    d = alpha.d
    q_ratios = [Fraction(b.q, a.q) for a, b in zip(simul_seq, simul_seq[1:])]
    sup_q = max(q_ratios)
    sup_m = max(Fraction(b.M, a.M) for a, b in zip(lin_seq, lin_seq[1:]))
    inf_l = _inf_ratio_enclosure([rec.L for rec in lin_seq])
    inf_xi = _inf_ratio_enclosure([rec.xi for rec in simul_seq])
    margin_s = badness_margin(simul_seq, d)
    margin_l = linform_margin(lin_seq, d)
    flags = (VIOLATED_FLAG,) if _ratio_growth_detected(q_ratios) else (CONSISTENT_FLAG,)
    return CriteriaReport(
        sup_q_ratio=sup_q,
        inf_l_ratio=inf_l,
        inf_xi_ratio=inf_xi,
        sup_m_ratio=sup_m,
        margin_simul=margin_s,
        margin_linform=margin_l,
        n_simul=len(simul_seq),
        n_linform=len(lin_seq),
        flags=flags,
    )


def _default_scale(seq: list[LinFormVector], d: int) -> Fraction:
    """Largest power of 1/2 satisfying both reversal preconditions."""
    m_mu = seq[-1].M
    k = max(0, (m_mu - 1).bit_length())  # smallest k with 2^k >= M_mu
    while True:
        t = Fraction(1, 1 << k)
        if _scale_ok(seq, d, t):
            return t
        k += 1
        if k > 4096:
            raise PreconditionViolated(
                "scale-search", "no power of 1/2 satisfies the value-height product bound"
            )


def _scale_ok(seq: list[LinFormVector], d: int, t: Fraction) -> bool:
    # requires T^(1-d) L_j M_j > 1 for every j, certified from below
    for rec in seq:
        bound = CertifiedReal.from_exact(t ** (d - 1))
        lhs = rec.L.scaled(Fraction(rec.M))
        out = certified_compare(lhs, bound, _CMP_WIDTH)
        if out is not Ordering.GREATER:
            return False
    return True


def reversal_transform(
    seq: list[LinFormVector], T: Optional[Fraction] = None
) -> tuple[list[ReversedRecord], ScaledLattice]:
    """Reverse a record prefix through the scaled lattice.

    Emits one record per input, ordered by increasing first coordinate
    z0 = T^-d L (so the LAST form record becomes the FIRST output), with
    rational tail zbar = sign * T * mbar. Certifies the exchange identities
    and the unit-product hypotheses needed by check_plane_product_bound.
    """
    if len(seq) < 2:
        raise DomainError("need at least 2 records")
    d = len(seq[0].m) - 1
    if d < 2:
        raise PreconditionViolated(
            "value-height-product", "T^(1-d) L M > 1 cannot hold for d = 1"
        )
    if int_rank([rec.m for rec in seq]) != d + 1:
        raise PreconditionViolated(
            "records-span-full-space", f"rank < {d + 1} over the given prefix"
        )
    m_mu = seq[-1].M
    if T is None:
        T = _default_scale(seq, d)
    else:
        if T <= 0:
            raise DomainError("T must be positive")
        if T * m_mu > 1:
            raise PreconditionViolated(
                "scale-below-inverse-height", f"T = {T} exceeds 1/{m_mu}"
            )
        if not _scale_ok(seq, d, T):
            raise PreconditionViolated(
                "value-height-product", f"T^(1-d) L M > 1 fails at T = {T}"
            )
    lattice = ScaledLattice(T, d)
    if lattice.det != 1:
        raise InternalCertificateFailure("unimodular-scaling", f"det = {lattice.det}")
    out: list[ReversedRecord] = []
    t_pow = T**-d
    for rec in reversed(seq):
        # orientation: flip m so the signed form value is positive, making
        # z0 = T^-d * L the honest first coordinate of sign * G * m
        if rec.sign == 0:
            raise PreconditionViolated("nonzero-form-value", f"L = 0 at M = {rec.M}")
        z0 = rec.L.scaled(t_pow)
        zbar = tuple(rec.sign * T * mj for mj in rec.mbar)
        out.append(ReversedRecord(z0, zbar, tuple(rec.sign * c for c in rec.m)))
    _certify_reversal(out, seq, lattice)
    return out, lattice


def _certify_reversal(
    out: list[ReversedRecord], seq: list[LinFormVector], lattice: ScaledLattice
) -> None:
    t = lattice.T
    # exchange identities: |zbar|_inf = T * M stays within the unit ball,
    # and consecutive outputs satisfy the unit product lower bound
    for rev, rec in zip(out, reversed(seq), strict=True):
        sup = max(abs(x) for x in rev.zbar)
        if sup != t * rec.M:
            raise InternalCertificateFailure(
                "height-exchange-identity", f"|zbar| = {sup} != T*M = {t * rec.M}"
            )
        if sup > 1:
            raise InternalCertificateFailure("unit-sup-norm", f"|zbar| = {sup} > 1")
    for prev, nxt in zip(out, out[1:]):
        prod = nxt.z0.scaled(max(abs(x) for x in prev.zbar))
        outp = certified_compare(prod, _ONE, _CMP_WIDTH)
        if outp is not Ordering.GREATER:
            raise InternalCertificateFailure(
                "unit-product-lower", "|zbar_nu| * z0_{nu+1} > 1 not certified"
            )


def check_plane_product_bound(records: list[ReversedRecord]) -> BoundReport:
    """Certifies |zbar_nu|_inf * z0_{nu+1} >= D2 / (2 sqrt2 d) per pair,
    in squared form, after certifying the unit-norm and unit-product
    hypotheses. D2 is the completed plane volume through the pair."""
    if len(records) < 2:
        raise DomainError("need at least 2 records")
    d = len(records[0].zbar)
    name = "plane-product-lower-bound"
    for nu in range(len(records) - 1):
        a, b = records[nu], records[nu + 1]
        sup_a = max(abs(x) for x in a.zbar)
        if sup_a > 1:
            raise PreconditionViolated("unit-sup-norm", f"|zbar_{nu}| = {sup_a} > 1")
        prod = b.z0.scaled(sup_a)
        if certified_compare(prod, _ONE, _CMP_WIDTH) is Ordering.LESS:
            raise PreconditionViolated(
                "unit-product-lower", f"|zbar_{nu}| * z0_{nu + 1} < 1"
            )
        d2_sq = _plane_volume_sq(a, b)
        # (|zbar| z0)^2 * 8 d^2 >= D2^2
        lhs = prod.pow_int(2).scaled(Fraction(8 * d * d))
        outp = certified_compare(lhs, d2_sq, _CMP_WIDTH)
        if outp is Ordering.TIE_UNDECIDED:
            raise UndecidablePrecision(context=name)
        if outp is Ordering.LESS:
            return BoundReport(name, nu + 1, False, nu)
    return BoundReport(name, len(records) - 1, True)


def _plane_volume_sq(a: ReversedRecord, b: ReversedRecord) -> CertifiedReal:
    """Squared completed plane volume through two reversed records.

    Mixed minors involve the certified z0 coordinates; the completion index
    comes from the integer source vectors when both are present."""
    total: Optional[CertifiedReal] = None
    zb_a = [CertifiedReal.from_exact(x) for x in a.zbar]
    zb_b = [CertifiedReal.from_exact(x) for x in b.zbar]
    for j in range(len(a.zbar)):
        mixed = a.z0 * zb_b[j] - zb_a[j] * b.z0
        term = mixed * mixed
        total = term if total is None else total + term
    for j in range(len(a.zbar)):
        for k in range(j + 1, len(a.zbar)):
            rat = a.zbar[j] * b.zbar[k] - a.zbar[k] * b.zbar[j]
            term = CertifiedReal.from_exact(rat * rat)
            total = term if total is None else total + term
    assert total is not None
    if a.m_source is not None and b.m_source is not None:
        g = math.gcd(*(abs(x) for x in minors2(a.m_source, b.m_source)))
        if g > 1:
            total = total.scaled(Fraction(1, g * g))
    return total
