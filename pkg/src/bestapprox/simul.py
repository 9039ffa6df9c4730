"""Best simultaneous approximations with certified record selection.

The enumerator runs a fixed-point prefilter over all denominators (compiled
kernel when available) and adjudicates the surviving candidates in exact or
certified-interval arithmetic, so every recorded strict inequality is a
theorem about the input, not a float artifact. The checking operations
certify the classical volume inequalities on the produced sequences; those
are theorems, so any reported violation means an enumerator bug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import scanker
from .errors import (
    DomainError,
    InternalCertificateFailure,
    NotSpanning,
    TieDetected,
    UndecidablePrecision,
)
from .exactcore import (
    CertifiedReal,
    IntVec,
    Ordering,
    certified_compare,
    completed_volume_sq,
    completed_volume_sq_k,
    ex_floor,
    ex_mul,
    ex_sub,
    int_rank,
)
from .exactcore.targets import TargetVector
from .report import BoundReport

_CMP_WIDTH = Fraction(1, 1 << 192)
_MARGIN_WIDTH = Fraction(1, 1 << 96)
_ONE = CertifiedReal.from_exact(Fraction(1))


@dataclass(frozen=True)
class ApproxVector:
    """One simultaneous-approximation record (q, a_1..a_d) with its sup-distance."""

    q: int
    a: tuple[int, ...]
    xi: CertifiedReal

    @property
    def vec(self) -> IntVec:
        return (self.q, *self.a)


@dataclass(frozen=True)
class KConstant:
    """The two-dimensional-lattice constant, kept as 1/K^2 = 4d(1+sum alpha_j^2).

    k_sq/k_sq_hi are a tight rational enclosure of K^2; inv_k_sq is the
    certified denominator used by the root-free checks (so no division ever
    enters the certified path).
    """

    d: int
    k_sq: Fraction
    k_sq_hi: Fraction
    inv_k_sq: CertifiedReal


@dataclass(frozen=True)
class IndependenceChain:
    """Greedily selected independent records and their sublattice volumes."""

    indices: tuple[int, ...]
    basis: tuple[IntVec, ...]
    volumes_sq: tuple[int, ...]


@dataclass(frozen=True)
class VolumeBoundsReport:
    checked: int
    passed: bool
    first_violation: Optional[tuple[int, str]] = None
    delta2_sq: tuple[int, ...] = ()


def _fixedpoint_setup(
    alpha: TargetVector, q_max: int
) -> tuple[list[int], int, int, int]:
    """Scaled coordinates in [0, 2^bits) plus sound per-q slack."""
    bits = min(48, 61 - q_max.bit_length())
    if bits < 16:
        raise DomainError("q_max too large for the fixed-point prefilter")
    one = 1 << bits
    scaled: list[int] = []
    worst_err = 1
    for coord in alpha.coords:
        if coord.is_exact:
            f = ex_floor(coord.exact)
            frac = ex_sub(coord.exact, Fraction(f))
            scaled.append(ex_floor(ex_mul(frac, Fraction(one))))
            err = 1
        else:
            lo = coord.mid - coord.radius
            hi = coord.mid + coord.radius
            flo = math.floor(lo)
            if flo != math.floor(hi):
                raise UndecidablePrecision(
                    context="ball coordinate straddles an integer"
                )
            scaled.append(math.floor((lo - flo) * one))
            err = 1 + math.ceil(2 * coord.radius * one)
        worst_err = max(worst_err, err)
    return scaled, one, bits, worst_err + 1


def enumerate_best_simul(alpha: TargetVector, q_max: int) -> list[ApproxVector]:
    """Complete ordered list of records with q <= q_max.

    Raises TieDetected on exactly equal sup-distances (rational or
    rationally dependent input) and UndecidablePrecision when a comparison
    cannot be settled within the precision budget.
    """
    if q_max < 1:
        raise DomainError("q_max must be >= 1")
    scaled, one, _bits, slack_per_q = _fixedpoint_setup(alpha, q_max)
    candidates = scanker.simul_candidates(scaled, one, 1, q_max, slack_per_q, 2)
    records: list[ApproxVector] = []
    best: Optional[CertifiedReal] = None
    best_q = 0
    for q in candidates:
        a_full: list[int] = []
        parts: list[CertifiedReal] = []
        for coord in alpha.coords:
            m, tie = coord.nearest_int_times(q)
            if tie:
                raise TieDetected(
                    f"half-integer remainder at q={q}", q_pair=(q, q)
                )
            a_full.append(m)
            parts.append(coord.remainder(q, m))
        xi = CertifiedReal.max_of(parts)
        if best is None:
            outcome = Ordering.LESS
        else:
            outcome = certified_compare(xi, best, _CMP_WIDTH)
        if outcome is Ordering.LESS:
            records.append(ApproxVector(q, tuple(a_full), xi))
            best, best_q = xi, q
        elif outcome is Ordering.EQUAL:
            raise TieDetected(
                f"equal sup-distance at q={best_q} and q={q}",
                q_pair=(best_q, q),
            )
        elif outcome is Ordering.TIE_UNDECIDED:
            raise UndecidablePrecision(
                f"cannot separate sup-distances at q={best_q} and q={q}",
                context="enumerate_best_simul",
            )
    return records


def k_constant(alpha: TargetVector) -> KConstant:
    """1/(4d(1+|alpha|^2)) as a certified square, enclosure width <= 2^-120."""
    d = alpha.d
    total = _ONE
    for coord in alpha.coords:
        total = total + coord.certified * coord.certified
    inv_k_sq = total.scaled(Fraction(4 * d))
    inv_k_sq.refine_to(Fraction(1, 1 << 130))
    k_sq = 1 / inv_k_sq.hi
    k_sq_hi = 1 / inv_k_sq.lo
    assert 0 < k_sq <= Fraction(1, 4)
    return KConstant(d, k_sq, k_sq_hi, inv_k_sq)


def _require_le(lhs: CertifiedReal, rhs: CertifiedReal, what: str) -> bool:
    out = certified_compare(lhs, rhs, _CMP_WIDTH)
    if out is Ordering.TIE_UNDECIDED:
        raise UndecidablePrecision(context=what)
    return out is not Ordering.GREATER


def check_minkowski_simul(seq: list[ApproxVector]) -> BoundReport:
    """Certifies xi_nu^d * q_{nu+1} <= 1 on consecutive pairs."""
    if len(seq) < 2:
        raise DomainError("need at least 2 records")
    d = len(seq[0].a)
    for nu in range(len(seq) - 1):
        lhs = seq[nu].xi.pow_int(d).scaled(Fraction(seq[nu + 1].q))
        if not _require_le(lhs, _ONE, "minkowski-simultaneous"):
            return BoundReport("minkowski-simultaneous", nu + 1, False, nu)
    return BoundReport("minkowski-simultaneous", len(seq) - 1, True)


def check_two_dim_volume_bounds(
    seq: list[ApproxVector], alpha: TargetVector
) -> VolumeBoundsReport:
    """Certifies, per consecutive pair with completed plane volume D2:

    - upper: xi_nu * q_{nu+1} <= D2
    - lower: K * D2 <= xi_nu * q_{nu+1}
    - exponent gap (d >= 2): (K*D2)^(d/(d-1)) <= q_{nu+1}

    All three are checked in squared, division-free form.
    """
    if len(seq) < 2:
        raise DomainError("need at least 2 records")
    d = alpha.d
    kc = k_constant(alpha)
    vols: list[int] = []
    for nu in range(len(seq) - 1):
        z0, z1 = seq[nu].vec, seq[nu + 1].vec
        d2_sq = completed_volume_sq(z0, z1)
        vols.append(d2_sq)
        q_next = seq[nu + 1].q
        prod_sq = seq[nu].xi.pow_int(2).scaled(Fraction(q_next * q_next))
        if not _require_le(prod_sq, CertifiedReal.from_exact(Fraction(d2_sq)), "volume-upper"):
            return VolumeBoundsReport(nu + 1, False, (nu, "upper"), tuple(vols))
        # lower in the form D2^2 <= (xi q)^2 * (1/K^2)
        lhs = CertifiedReal.from_exact(Fraction(d2_sq))
        if not _require_le(lhs, prod_sq * kc.inv_k_sq, "volume-lower"):
            return VolumeBoundsReport(nu + 1, False, (nu, "lower"), tuple(vols))
        if d >= 2:
            # (K^2 D2^2)^d <= q^(2(d-1))  <=>  D2^(2d) <= q^(2(d-1)) (1/K^2)^d
            gap_lhs = CertifiedReal.from_exact(Fraction(d2_sq**d))
            gap_rhs = kc.inv_k_sq.pow_int(d).scaled(
                Fraction(q_next ** (2 * (d - 1)))
            )
            if not _require_le(gap_lhs, gap_rhs, "volume-exponent-gap"):
                return VolumeBoundsReport(nu + 1, False, (nu, "exponent-gap"), tuple(vols))
    return VolumeBoundsReport(len(seq) - 1, True, None, tuple(vols))


def build_independence_chain(seq: list[ApproxVector], start: int = 0) -> IndependenceChain:
    """Greedy selection: the start pair, then the earliest rank-raising record."""
    if not seq:
        raise DomainError("empty sequence")
    dim = len(seq[0].a) + 1
    if start < 0 or start + 1 >= len(seq):
        raise DomainError("start pair out of range")
    chosen = [seq[start].vec, seq[start + 1].vec]
    indices = [start, start + 1]
    if int_rank(chosen) != 2:
        raise InternalCertificateFailure(
            "consecutive-records-independent", f"at indices {start},{start + 1}"
        )
    mu = start + 2
    while len(chosen) < dim:
        while mu < len(seq) and int_rank(chosen + [seq[mu].vec]) == len(chosen):
            mu += 1
        if mu == len(seq):
            raise NotSpanning(
                f"records span only rank {len(chosen)} of {dim} up to the bound"
            )
        chosen.append(seq[mu].vec)
        indices.append(mu)
        mu += 1
    volumes = tuple(completed_volume_sq_k(chosen[:j]) for j in range(1, dim + 1))
    if volumes[-1] != 1:
        raise InternalCertificateFailure("full-rank-volume-one", f"got {volumes[-1]}")
    return IndependenceChain(tuple(indices), tuple(chosen), volumes)


def check_lemma_volume_growth(
    chain: IndependenceChain, seq: list[ApproxVector]
) -> BoundReport:
    """Certifies the chain volume-growth inequality in squared form:

    D_{j+1}^2 * q_{nu-1}^2 <= 4d * D_j^2 * q_nu^2 * xi_{nu-1}^2,
    where nu is the (j+1)-th chain index and q_{nu-1}, xi_{nu-1} come from
    the record immediately preceding it in the full sequence.
    """
    d = len(seq[0].a)
    name = "volume-growth-per-step"
    for j in range(len(chain.indices) - 1):
        nu = chain.indices[j + 1]
        q_prev = seq[nu - 1].q
        q_cur = seq[nu].q
        lhs = CertifiedReal.from_exact(
            Fraction(chain.volumes_sq[j + 1] * q_prev * q_prev)
        )
        rhs = seq[nu - 1].xi.pow_int(2).scaled(
            Fraction(4 * d * chain.volumes_sq[j] * q_cur * q_cur)
        )
        if not _require_le(lhs, rhs, name):
            return BoundReport(name, j + 1, False, j, "volume-growth")
    return BoundReport(name, len(chain.indices) - 1, True)


def badness_margin(seq: list[ApproxVector], d: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of min_nu q_nu * xi_nu^d over the sequence."""
    if not seq:
        raise DomainError("empty sequence")
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for rec in seq:
        t = rec.xi.pow_int(d).scaled(Fraction(rec.q))
        t.refine_to(_MARGIN_WIDTH)
        lo = t.lo if lo is None else min(lo, t.lo)
        hi = t.hi if hi is None else min(hi, t.hi)
    assert lo is not None and hi is not None
    return lo, hi


def quantitative_badness_check(
    seq: list[ApproxVector], alpha: TargetVector
) -> BoundReport:
    """Certifies q_nu xi_nu^d >= K / ((2 sqrt d)^(d-1) M^d) with M the
    observed sup of q_{nu+1}/q_nu, at every index whose greedy chain
    completes inside the sequence (squared, division-free form)."""
    if len(seq) < 2:
        raise DomainError("need at least 2 records")
    d = alpha.d
    kc = k_constant(alpha)
    m_cap = max(Fraction(seq[i + 1].q, seq[i].q) for i in range(len(seq) - 1))
    name = "quantitative-badness-lower-bound"
    checked = 0
    for nu in range(len(seq) - 1):
        try:
            build_independence_chain(seq, start=nu)
        except (NotSpanning, DomainError):
            continue
        checked += 1
        # (q xi^d)^2 * (4d)^(d-1) * M^(2d) * (1/K^2) >= 1
        lhs = (
            seq[nu].xi.pow_int(2 * d).scaled(
                Fraction(seq[nu].q * seq[nu].q * (4 * d) ** (d - 1)) * m_cap ** (2 * d)
            )
            * kc.inv_k_sq
        )
        if not _require_le(_ONE, lhs, name):
            return BoundReport(name, checked, False, nu, "quantitative-lower")
    return BoundReport(name, checked, True)
