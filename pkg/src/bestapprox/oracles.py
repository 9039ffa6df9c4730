"""Independent exhaustive reference scans for record enumeration.

Second route for every derived fixture: plain exact arithmetic over every
denominator (or every height shell), no shared comparison machinery with
the production drivers. Requires exact targets. The simultaneous scan
partitions the q range into chunks and stitches per-chunk minima, so the
merge order is deterministic and chunking is testable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DomainError, TieDetected, UndecidablePrecision
from .exactcore.numbers import (
    ExactReal,
    ex_abs,
    ex_add,
    ex_compare,
    ex_compatible,
    ex_enclosure,
    ex_floor,
    ex_mul,
    ex_sub,
)
from .exactcore.targets import TargetVector

_ORACLE_BITS = 4096
_HALF = Fraction(1, 2)
_ONE_BITS = 44
_ONE = 1 << _ONE_BITS


def _encl(x: ExactReal, bits: int) -> tuple[Fraction, Fraction]:
    if isinstance(x, Fraction):
        return x, x
    return ex_enclosure(x, bits)


def _cmp_exact(x: ExactReal, y: ExactReal) -> int:
    """Three-way compare across fields, refining enclosures on demand."""
    if ex_compatible(x, y):
        return ex_compare(x, y)
    bits = 64
    while bits <= _ORACLE_BITS:
        xlo, xhi = _encl(x, bits)
        ylo, yhi = _encl(y, bits)
        if xhi < ylo:
            return -1
        if xlo > yhi:
            return 1
        bits *= 2
    raise UndecidablePrecision(context="oracle cross-field compare")


def _nearest(x: ExactReal, q: int) -> tuple[int, ExactReal]:
    """(nearest integer to q*x, distance); half-integer raises TieDetected."""
    v = ex_mul(x, Fraction(q))
    f = ex_floor(v)
    fr = ex_sub(v, Fraction(f))
    s = ex_compare(fr, _HALF)
    if s == 0:
        raise TieDetected(f"half-integer remainder at q={q}", q_pair=(q, q))
    if s < 0:
        return f, fr
    return f + 1, ex_sub(Fraction(1), fr)


def _scan_range(
    coords: list[ExactReal], q_lo: int, q_hi: int
) -> list[tuple[int, tuple[int, ...], ExactReal]]:
    """Running minima within [q_lo, q_hi], ties kept for the stitch step."""
    out: list[tuple[int, tuple[int, ...], ExactReal]] = []
    local: Optional[ExactReal] = None
    for q in range(q_lo, q_hi + 1):
        ms = []
        xi: Optional[ExactReal] = None
        for x in coords:
            m, dist = _nearest(x, q)
            ms.append(m)
            if xi is None or _cmp_exact(dist, xi) > 0:
                xi = dist
        assert xi is not None
        if local is None or _cmp_exact(xi, local) <= 0:
            out.append((q, tuple(ms), xi))
            local = xi
    return out


def oracle_best_simul(
    target: TargetVector, q_max: int, chunk: int = 4096
) -> list[tuple[int, tuple[int, ...], ExactReal]]:
    """Exhaustive record scan over q = 1..q_max, chunked with a stitch merge."""
    if not target.is_exact:
        raise DomainError("oracle scans require exact target coordinates")
    if q_max < 1:
        raise DomainError("q_max must be >= 1")
    coords = [c.exact for c in target.coords]
    records: list[tuple[int, tuple[int, ...], ExactReal]] = []
    best: Optional[ExactReal] = None
    best_q = 0
    for lo in range(1, q_max + 1, chunk):
        for q, ms, xi in _scan_range(coords, lo, min(lo + chunk - 1, q_max)):
            if best is None:
                c = -1
            else:
                c = _cmp_exact(xi, best)
            if c < 0:
                records.append((q, ms, xi))
                best, best_q = xi, q
            elif c == 0:
                raise TieDetected(
                    f"equal sup-distance at q={best_q} and q={q}",
                    q_pair=(best_q, q),
                )
    return records


class _FormValue:
    """|m0 + sum m_j alpha_j| with refinable enclosure; exact when same-field."""

    __slots__ = ("fracs", "mvec", "m0", "exact", "_lo", "_hi", "_bits")

    def __init__(self, fracs: list[ExactReal], mvec: tuple[int, ...]):
        self.fracs = fracs
        self.mvec = mvec
        self.m0: Optional[int] = None
        self.exact: Optional[ExactReal] = None
        total: Optional[ExactReal] = None
        for m, x in zip(mvec, fracs, strict=True):
            term = ex_mul(x, Fraction(m))
            if total is None:
                total = term
            elif ex_compatible(total, term):
                total = ex_add(total, term)
            else:
                total = None
                break
        if total is not None:
            n = _round_half_down(total)
            self.m0 = -n
            self.exact = ex_abs(ex_sub(total, Fraction(n)))
        self._lo: Optional[Fraction] = None
        self._hi: Optional[Fraction] = None
        self._bits = 0

    def encl(self, bits: int) -> tuple[Fraction, Fraction]:
        if self.exact is not None:
            return _encl(self.exact, bits)
        if 0 < bits <= self._bits and self._lo is not None:
            return self._lo, self._hi
        lo = hi = Fraction(0)
        for m, x in zip(self.mvec, self.fracs, strict=True):
            xlo, xhi = _encl(x, bits + 12)
            tlo, thi = (m * xlo, m * xhi) if m >= 0 else (m * xhi, m * xlo)
            lo, hi = lo + tlo, hi + thi
        n = _interval_round(lo, hi)
        if n is None:
            # sum straddles a half-integer: distance is within width of 1/2
            width = hi - lo
            return max(Fraction(0), _HALF - width), _HALF
        self.m0 = -n
        alo, ahi = lo - n, hi - n
        if ahi <= 0:
            alo, ahi = -ahi, -alo
        elif alo < 0:
            alo, ahi = Fraction(0), max(-alo, ahi)
        self._lo, self._hi, self._bits = alo, ahi, bits
        return alo, ahi


def _round_half_down(x: ExactReal) -> int:
    """Nearest integer, half-integer handled as a detectable tie upstream."""
    f = ex_floor(x)
    fr = ex_sub(x, Fraction(f))
    s = ex_compare(fr, _HALF)
    return f if s < 0 else f + 1


def _interval_round(lo: Fraction, hi: Fraction) -> Optional[int]:
    nlo = (2 * lo.numerator + lo.denominator) // (2 * lo.denominator)
    nhi = (2 * hi.numerator + hi.denominator) // (2 * hi.denominator)
    return nlo if nlo == nhi else None


def _cmp_form(a: _FormValue, b: _FormValue) -> int:
    if a.exact is not None and b.exact is not None:
        return _cmp_exact(a.exact, b.exact)
    bits = 64
    while bits <= _ORACLE_BITS:
        alo, ahi = a.encl(bits)
        blo, bhi = b.encl(bits)
        if ahi < blo:
            return -1
        if alo > bhi:
            return 1
        bits *= 2
    raise UndecidablePrecision(context="oracle linear-form compare")


def _shell_vectors_d2(m_abs: int) -> np.ndarray:
    side = np.arange(-m_abs, m_abs + 1, dtype=np.int64)
    rows = [np.stack([np.full_like(side, m_abs), side], axis=1)]
    if m_abs > 1:
        inner = np.arange(1, m_abs, dtype=np.int64)
        rows.append(np.stack([inner, np.full_like(inner, m_abs)], axis=1))
        rows.append(np.stack([inner, np.full_like(inner, -m_abs)], axis=1))
    rows.append(np.array([[0, m_abs]], dtype=np.int64))
    return np.concatenate(rows, axis=0)


def oracle_best_linform(
    target: TargetVector, m_max: int
) -> list[tuple[tuple[int, ...], int, _FormValue]]:
    """Exhaustive shell scan over heights 1..m_max.

    Returns (full m tuple incl m_0, height M, value) per record. Uses a
    coarse fixed-point filter per shell (soundness slack included) and
    adjudicates survivors in exact/interval arithmetic.
    """
    if not target.is_exact:
        raise DomainError("oracle scans require exact target coordinates")
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    d = target.d
    floors = [ex_floor(c.exact) for c in target.coords]
    fracs = [ex_sub(c.exact, Fraction(f)) for c, f in zip(target.coords, floors, strict=True)]
    if d != 2:
        return _oracle_linform_plain(fracs, floors, m_max)
    a_scaled = np.asarray(
        [ex_floor(ex_mul(x, Fraction(_ONE))) for x in fracs], dtype=np.int64
    )
    records: list[tuple[tuple[int, ...], int, _FormValue]] = []
    best: Optional[_FormValue] = None
    best_scaled_hi = _ONE
    for m_abs in range(1, m_max + 1):
        shell = _shell_vectors_d2(m_abs)
        s = shell @ a_scaled
        r = s % _ONE
        dist = np.minimum(r, _ONE - r)
        slack = 2 * m_abs + 2
        keep = shell[dist - slack <= best_scaled_hi]
        if len(keep) == 0:
            continue
        shell_best: Optional[_FormValue] = None
        shell_tie = False
        for row in keep:
            val = _FormValue(fracs, (int(row[0]), int(row[1])))
            if shell_best is None:
                shell_best = val
                continue
            c = _cmp_form(val, shell_best)
            if c < 0:
                shell_best, shell_tie = val, False
            elif c == 0:
                shell_tie = True
        assert shell_best is not None
        c = -1 if best is None else _cmp_form(shell_best, best)
        if c < 0:
            if shell_tie:
                raise TieDetected(f"equal form values within height {m_abs}")
            records.append(_finish_record(shell_best, floors, m_abs))
            best = shell_best
            _, hi = best.encl(2 * _ONE_BITS)
            best_scaled_hi = math.ceil(hi * _ONE) + 1
        elif c == 0:
            raise TieDetected(f"form value at height {m_abs} ties the running record")
    return records


def _finish_record(
    val: _FormValue, floors: list[int], m_abs: int
) -> tuple[tuple[int, ...], int, _FormValue]:
    if val.m0 is None:
        val.encl(_ORACLE_BITS)
    assert val.m0 is not None
    m0 = val.m0 - sum(m * f for m, f in zip(val.mvec, floors, strict=True))
    return (m0, *val.mvec), m_abs, val


def _oracle_linform_plain(
    fracs: list[ExactReal], floors: list[int], m_max: int
) -> list[tuple[tuple[int, ...], int, _FormValue]]:
    from itertools import product

    d = len(fracs)
    records: list[tuple[tuple[int, ...], int, _FormValue]] = []
    best: Optional[_FormValue] = None
    for m_abs in range(1, m_max + 1):
        shell_best: Optional[_FormValue] = None
        shell_tie = False
        for vec in product(range(-m_abs, m_abs + 1), repeat=d):
            if max(abs(c) for c in vec) != m_abs:
                continue
            lead = next(c for c in vec if c)
            if lead < 0:
                continue
            val = _FormValue(fracs, vec)
            if shell_best is None:
                shell_best = val
                continue
            c = _cmp_form(val, shell_best)
            if c < 0:
                shell_best, shell_tie = val, False
            elif c == 0:
                shell_tie = True
        assert shell_best is not None
        c = -1 if best is None else _cmp_form(shell_best, best)
        if c < 0:
            if shell_tie:
                raise TieDetected(f"equal form values within height {m_abs}")
            records.append(_finish_record(shell_best, floors, m_abs))
            best = shell_best
        elif c == 0:
            raise TieDetected(f"form value at height {m_abs} ties the running record")
    return records
