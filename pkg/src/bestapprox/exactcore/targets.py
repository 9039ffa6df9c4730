"""Approximation-target parsing and representation.

Grammar (shared with the CLI):
    rat:<num>/<den>          exact rational
    surd:(<a>+<b>*sqrt(<D>))/<c>   exact quadratic surd
    dec:<digits>~<radius>    decimal midpoint with explicit rational radius

Any form may carry a trailing " + k" or " - k" shift with k an integer or
rational; vectors are comma-separated coordinate specs.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from ..errors import DomainError, UndecidablePrecision
from .certified import CertifiedReal
from .numbers import ExactReal, QuadSurd, ex_add, ex_mul, ex_nearest_int, ex_to_float

_RAT = re.compile(r"rat:(-?\d+)(?:/(\d+))?")
_SURD = re.compile(r"surd:\((-?\d+)([+-]\d+)\*sqrt\((\d+)\)\)/(-?\d+)")
_DEC = re.compile(r"dec:(-?\d+(?:\.\d+)?)~([0-9eE./+-]+)")
_SHIFT = re.compile(r"\s*([+-])\s*(\d+(?:/\d+)?)\s*$")


class TargetCoordinate:
    """One coordinate of the target vector alpha."""

    def __init__(self, kind: str, exact: Optional[ExactReal], mid: Fraction, radius: Fraction, spec: str):
        self.kind = kind  # "rational" | "surd" | "ball"
        self.exact = exact
        self.mid = mid
        self.radius = radius
        self.spec = spec
        if exact is not None:
            self.certified = CertifiedReal.from_exact(exact)
        else:
            self.certified = CertifiedReal.from_ball(mid, radius)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def nearest_int_times(self, q: int) -> tuple[int, bool]:
        """Nearest integer to q*alpha and an exact-half-way tie flag."""
        if self.exact is not None:
            return ex_nearest_int(ex_mul(self.exact, Fraction(q)))
        x = self.mid * q
        m = (2 * x.numerator + x.denominator) // (2 * x.denominator)  # floor(x + 1/2)
        half_gap = min(abs(x - m - Fraction(1, 2)), abs(x - m + Fraction(1, 2)))
        if half_gap <= q * self.radius:
            raise UndecidablePrecision(context=f"nearest integer to {q}*alpha inside ball")
        return m, False

    def remainder(self, q: int, m: int) -> CertifiedReal:
        """|q*alpha - m| as a certified value (exact when the backend is)."""
        qa = self.certified.scaled(Fraction(q))
        return (qa - CertifiedReal.from_exact(Fraction(m))).abs_()

    def to_float(self) -> float:
        if self.exact is not None:
            return ex_to_float(self.exact)
        return float(self.mid)


class TargetVector:
    """The target alpha in R^d."""

    def __init__(self, coords: list[TargetCoordinate], spec: str):
        if not coords:
            raise DomainError("empty target")
        self.coords = coords
        self.spec = spec

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.coords)

    @property
    def all_rational(self) -> bool:
        return all(isinstance(c.exact, Fraction) for c in self.coords if c.exact is not None) and self.is_exact


def _parse_shift(tail: str) -> tuple[Fraction, str]:
    m = _SHIFT.match(tail)
    if not m:
        raise DomainError(f"cannot parse target suffix {tail!r}")
    sign = 1 if m.group(1) == "+" else -1
    return sign * Fraction(m.group(2)), tail[m.end():]


def parse_target(spec: str) -> TargetCoordinate:
    s = spec.strip()
    if s.startswith("rat:"):
        m = _RAT.match(s)
        if not m:
            raise DomainError(f"cannot parse rational target {spec!r}")
        value: ExactReal = Fraction(int(m.group(1)), int(m.group(2) or 1))
        tail = s[m.end():]
        while tail.strip():
            shift, tail = _parse_shift(tail)
            value = value + shift
        return TargetCoordinate("rational", value, value, Fraction(0), spec=s)
    if s.startswith("surd:"):
        m = _SURD.match(s)
        if not m:
            raise DomainError(f"cannot parse surd target {spec!r}")
        a, b, d_rad, c = int(m.group(1)), int(m.group(2)), int(m.group(3)), int(m.group(4))
        surd: ExactReal = QuadSurd(a, b, c, d_rad)
        tail = s[m.end():]
        while tail.strip():
            shift, tail = _parse_shift(tail)
            surd = ex_add(surd, shift)
        if isinstance(surd, Fraction):
            return TargetCoordinate("rational", surd, surd, Fraction(0), spec=s)
        return TargetCoordinate("surd", surd, Fraction(0), Fraction(0), spec=s)
    if s.startswith("dec:"):
        m = _DEC.match(s)
        if not m:
            raise DomainError(f"cannot parse decimal target {spec!r}")
        mid = Fraction(m.group(1))
        radius = Fraction(m.group(2))
        if radius < 0:
            raise DomainError("negative radius")
        tail = s[m.end():]
        while tail.strip():
            shift, tail = _parse_shift(tail)
            mid = mid + shift
        return TargetCoordinate("ball", None, mid, radius, spec=s)
    raise DomainError(f"unknown target scheme in {spec!r}")


def parse_target_vector(spec: str) -> TargetVector:
    parts = [p for p in spec.split(",") if p.strip()]
    if not parts:
        raise DomainError("empty target vector")
    return TargetVector([parse_target(p) for p in parts], spec=spec.strip())
