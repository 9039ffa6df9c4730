"""Exact real scalars: rationals and quadratic surds (a + b*sqrt(D))/c.

An ExactReal is either a Fraction or a QuadSurd. All predicates here
(sign, floor, comparison) are decided exactly with integer arithmetic;
enclosures of any requested width come from integer square roots. Surds
in the same field (equal squarefree D) form a ring together with the
rationals; cross-field products are not represented exactly and belong
to the certified-interval layer.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Union

from ..errors import DomainError

ExactReal = Union[Fraction, "QuadSurd"]


def squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, m) with n = s*s*m and m squarefree, for n >= 1."""
    if n < 1:
        raise DomainError("radicand must be positive")
    s, m, p = 1, 1, 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                m *= p
        p += 1 if p == 2 else 2
    return s, m * n


def floor_mul_sqrt(b: int, D: int) -> int:
    """floor(b*sqrt(D)) for integer b and non-square D >= 2."""
    if b == 0:
        return 0
    r = isqrt(b * b * D)
    # b*b*D is never a perfect square when D is squarefree >= 2 and b != 0,
    # so b*sqrt(D) is strictly between r and r+1 for b > 0.
    return r if b > 0 else -r - 1


class QuadSurd:
    """Immutable (a + b*sqrt(D)) / c with b != 0, c > 0, D squarefree >= 2."""

    __slots__ = ("a", "b", "c", "D")

    def __init__(self, a: int, b: int, c: int, D: int):
        if c == 0:
            raise ZeroDivisionError("surd denominator is zero")
        if c < 0:
            a, b, c = -a, -b, -c
        s, m = squarefree_split(D)
        if m == 1:
            raise DomainError("radicand is a perfect square; use Fraction")
        a, b, D = a, b * s, m
        if b == 0:
            raise DomainError("rational value; use Fraction")
        g = gcd(gcd(abs(a), abs(b)), c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)
        object.__setattr__(self, "D", D)

    def __setattr__(self, name, value):
        raise AttributeError("QuadSurd is immutable")

    def __repr__(self) -> str:
        return f"({self.a}+{self.b}*sqrt({self.D}))/{self.c}"

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadSurd):
            return (self.a, self.b, self.c, self.D) == (other.a, other.b, other.c, other.D)
        return False

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.D))

    def conjugate(self) -> "QuadSurd":
        return QuadSurd(self.a, -self.b, self.c, self.D)


def ex_sign(x: ExactReal) -> int:
    """Exact sign in {-1, 0, 1}."""
    if isinstance(x, Fraction):
        n = x.numerator
        return (n > 0) - (n < 0)
    a, b = x.a, x.b
    if a >= 0 and b > 0:
        return 1
    if a <= 0 and b < 0:
        return -1
    # signs of a and b differ and both are nonzero
    lhs, rhs = a * a, b * b * x.D
    if a > 0:
        return 1 if lhs > rhs else -1  # equality impossible: D non-square
    return -1 if lhs > rhs else 1


def ex_neg(x: ExactReal) -> ExactReal:
    if isinstance(x, Fraction):
        return -x
    return QuadSurd(-x.a, -x.b, x.c, x.D)


def ex_abs(x: ExactReal) -> ExactReal:
    return ex_neg(x) if ex_sign(x) < 0 else x


def ex_add(x: ExactReal, y: ExactReal) -> ExactReal:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x + y
    if isinstance(x, Fraction):
        x, y = y, x
    if isinstance(y, Fraction):
        p, q = y.numerator, y.denominator
        return QuadSurd(x.a * q + p * x.c, x.b * q, x.c * q, x.D)
    if x.D != y.D:
        raise DomainError("incompatible surd fields")
    a = x.a * y.c + y.a * x.c
    b = x.b * y.c + y.b * x.c
    c = x.c * y.c
    if b == 0:
        return Fraction(a, c)
    return QuadSurd(a, b, c, x.D)


def ex_sub(x: ExactReal, y: ExactReal) -> ExactReal:
    return ex_add(x, ex_neg(y))


def ex_mul(x: ExactReal, y: ExactReal) -> ExactReal:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x * y
    if isinstance(x, Fraction):
        x, y = y, x
    if isinstance(y, Fraction):
        if y == 0:
            return Fraction(0)
        return QuadSurd(x.a * y.numerator, x.b * y.numerator, x.c * y.denominator, x.D)
    if x.D != y.D:
        raise DomainError("incompatible surd fields")
    a = x.a * y.a + x.b * y.b * x.D
    b = x.a * y.b + x.b * y.a
    c = x.c * y.c
    if b == 0:
        return Fraction(a, c)
    return QuadSurd(a, b, c, x.D)


def ex_div_int(x: ExactReal, n: int) -> ExactReal:
    if isinstance(x, Fraction):
        return x / n
    return QuadSurd(x.a, x.b, x.c * n, x.D)


def ex_inv(x: ExactReal) -> ExactReal:
    """Exact reciprocal; stays in the same field (conjugate trick)."""
    if isinstance(x, Fraction):
        return 1 / x
    norm = x.a * x.a - x.b * x.b * x.D  # (a+b sqrt D)(a-b sqrt D)
    return QuadSurd(x.a * x.c, -x.b * x.c, norm, x.D)


def ex_div(x: ExactReal, y: ExactReal) -> ExactReal:
    return ex_mul(x, ex_inv(y))


def ex_compare(x: ExactReal, y: ExactReal) -> int:
    """Exact three-way comparison; requires compatible fields."""
    return ex_sign(ex_sub(x, y))


def ex_compatible(x: ExactReal, y: ExactReal) -> bool:
    """True when x - y is exactly representable (same field or rational)."""
    if isinstance(x, Fraction) or isinstance(y, Fraction):
        return True
    return x.D == y.D


def ex_floor(x: ExactReal) -> int:
    if isinstance(x, Fraction):
        return x.numerator // x.denominator
    n = (x.a + floor_mul_sqrt(x.b, x.D)) // x.c
    # the integer estimate can be off by one at denominator boundaries
    while ex_compare(x, Fraction(n)) < 0:
        n -= 1
    while ex_compare(x, Fraction(n + 1)) >= 0:
        n += 1
    return n


def ex_nearest_int(x: ExactReal) -> tuple[int, bool]:
    """Nearest integer to x and a flag marking an exact half-integer tie."""
    if isinstance(x, Fraction):
        two = 2 * x
        if two.denominator == 1 and two.numerator % 2:
            return (two.numerator + 1) // 2, True
        return ex_floor(x + Fraction(1, 2)), False
    return ex_floor(ex_add(x, Fraction(1, 2))), False


def ex_enclosure(x: ExactReal, bits: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure [lo, hi] with hi - lo <= 2^-bits."""
    if isinstance(x, Fraction):
        return x, x
    t = 1 << bits
    u = floor_mul_sqrt(x.b * t, x.D)
    lo = Fraction(x.a * t + u, x.c * t)
    hi = Fraction(x.a * t + u + 1, x.c * t)
    return (lo, hi) if x.c > 0 else (hi, lo)


def ex_to_float(x: ExactReal) -> float:
    lo, hi = ex_enclosure(x, 64) if isinstance(x, QuadSurd) else (x, x)
    return float((lo + hi) / 2)
