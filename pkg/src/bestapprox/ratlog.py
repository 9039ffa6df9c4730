"""Rational enclosures of logarithms.

Natural logs are enclosed with exact Fraction arithmetic: the argument is
pre-rounded to a directed dyadic bracket (so series terms stay small even
for inputs with million-bit numerators), reduced to m * 2^e with m in
[1, 2), and ln m is summed via the atanh series 2*sum t^(2k+1)/(2k+1)
with t = (m-1)/(m+1) <= 1/3 and an explicit geometric tail bound. Every
returned interval is a guaranteed bracket.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError

Interval = tuple[Fraction, Fraction]


def _floor_log2(x: Fraction) -> int:
    """Largest e with 2^e <= x, for x > 0."""
    e = x.numerator.bit_length() - x.denominator.bit_length()
    if x < Fraction(1 << max(e, 0), 1 << max(-e, 0)):
        e -= 1
    return e


def dyadic_bracket(x: Fraction, bits: int) -> Interval:
    """[lo, hi] dyadic with lo <= x <= hi and relative width <= 2^-bits."""
    if x <= 0:
        raise DomainError("positive argument required")
    e = _floor_log2(x)
    s = bits - e
    num = x.numerator << max(s, 0)
    den = x.denominator << max(-s, 0)
    lo = num // den
    hi = lo if lo * den == num else lo + 1
    unit = Fraction(1, 1 << s) if s >= 0 else Fraction(1 << -s)
    return lo * unit, hi * unit


def _atanh_series_bound(t: Fraction, err: Fraction) -> Interval:
    """[lo, hi] for 2*atanh(t), 0 <= t <= 1/3, with hi - lo <= err."""
    assert 0 <= t < Fraction(1, 2)
    one_minus_t2 = 1 - t * t
    total = Fraction(0)
    power = t
    k = 0
    while True:
        tail = 2 * power / ((2 * k + 1) * one_minus_t2)
        if tail <= err:
            return 2 * total, 2 * total + tail
        total += power / (2 * k + 1)
        power *= t * t
        k += 1


_LN2_CACHE: dict[int, Interval] = {}


def ln2_enclosure(bits: int) -> Interval:
    """ln 2 = 2*atanh(1/3)."""
    if bits not in _LN2_CACHE:
        _LN2_CACHE[bits] = _atanh_series_bound(Fraction(1, 3), Fraction(1, 1 << bits))
    return _LN2_CACHE[bits]


def ln_enclosure(x: Fraction, bits: int = 64) -> Interval:
    """[lo, hi] containing ln x with hi - lo <= ~2^-(bits-4)."""
    if x <= 0:
        raise DomainError("ln of non-positive value")
    if x == 1:
        return Fraction(0), Fraction(0)
    if x < 1:
        lo, hi = ln_enclosure(1 / x, bits)
        return -hi, -lo
    xlo, xhi = dyadic_bracket(x, bits + 8)
    err = Fraction(1, 1 << (bits + 4))
    out_lo, out_hi = None, None
    for bound, pick_lo in ((xlo, True), (xhi, False)):
        e = _floor_log2(bound)
        m = bound / (1 << e) if e >= 0 else bound * (1 << -e)
        t = (m - 1) / (m + 1)
        s_lo, s_hi = _atanh_series_bound(t, err)
        l2_lo, l2_hi = ln2_enclosure(bits + 8)
        if e >= 0:
            v_lo, v_hi = e * l2_lo + s_lo, e * l2_hi + s_hi
        else:
            v_lo, v_hi = e * l2_hi + s_lo, e * l2_lo + s_hi
        if pick_lo:
            out_lo = v_lo
        else:
            out_hi = v_hi
    return out_lo, out_hi


def log2_enclosure(x: Fraction, bits: int = 64) -> Interval:
    """[lo, hi] containing log2(x)."""
    n_lo, n_hi = ln_enclosure(x, bits + 8)
    d_lo, d_hi = ln2_enclosure(bits + 8)
    return div_enclosure((n_lo, n_hi), (d_lo, d_hi))


def div_enclosure(num: Interval, den: Interval) -> Interval:
    """Interval quotient; denominator interval must not contain 0."""
    n_lo, n_hi = num
    d_lo, d_hi = den
    if d_lo <= 0 <= d_hi:
        raise DomainError("denominator interval straddles zero")
    cands = (n_lo / d_lo, n_lo / d_hi, n_hi / d_lo, n_hi / d_hi)
    return min(cands), max(cands)


def round_dyadic(x: Fraction, bits: int = 64) -> Fraction:
    """Deterministic dyadic rounding for report serialization."""
    scaled = x * (1 << bits)
    n = scaled.numerator // scaled.denominator
    if 2 * (scaled - n) >= 1:
        n += 1
    return Fraction(n, 1 << bits)
