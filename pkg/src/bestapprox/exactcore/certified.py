"""Certified real numbers: exact rational enclosures with on-demand refinement.

A CertifiedReal owns a rational interval [lo, hi] guaranteed to contain the
value. Exact backends (rational, quadratic surd) refine to any width;
decimal-ball backends saturate at their stated radius; derived nodes
(sums, products, abs, max) refine by refining their operands. Comparisons
that stay undecided at the precision budget are reported as such, never
resolved silently.
"""

from __future__ import annotations

import os
from enum import IntEnum
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import UndecidablePrecision
from .numbers import (
    ExactReal,
    QuadSurd,
    ex_abs,
    ex_add,
    ex_compare,
    ex_compatible,
    ex_enclosure,
    ex_floor,
    ex_mul,
    ex_sign,
    ex_sub,
)

DEFAULT_PRECISION_BITS = 4096


def precision_budget_bits() -> int:
    raw = os.environ.get("DIOPH_PRECISION_BITS", "")
    try:
        return max(64, int(raw)) if raw else DEFAULT_PRECISION_BITS
    except ValueError:
        return DEFAULT_PRECISION_BITS


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    TIE_UNDECIDED = 2


def _width_bits(width: Fraction) -> int:
    """Smallest b with 2^-b <= width."""
    if width <= 0:
        raise ValueError("width must be positive")
    inv = 1 / width
    b = (inv.numerator // inv.denominator).bit_length()
    return b + 1


class CertifiedReal:
    """Interval-enclosed real; immutable value, monotone-tightening enclosure."""

    __slots__ = ("_lo", "_hi", "exact", "_op", "_args", "_bits")

    def __init__(
        self,
        lo: Fraction,
        hi: Fraction,
        exact: Optional[ExactReal] = None,
        op: str = "leaf",
        args: Sequence["CertifiedReal"] = (),
    ):
        if lo > hi:
            raise ValueError("empty enclosure")
        self._lo = lo
        self._hi = hi
        self.exact = exact
        self._op = op
        self._args = tuple(args)
        self._bits = 0

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_exact(cls, x) -> "CertifiedReal":
        if isinstance(x, int):
            x = Fraction(x)
        if isinstance(x, Fraction):
            return cls(x, x, exact=x)
        if isinstance(x, QuadSurd):
            lo, hi = ex_enclosure(x, 32)
            return cls(lo, hi, exact=x)
        raise TypeError(f"not an exact real: {x!r}")

    @classmethod
    def from_ball(cls, mid: Fraction, radius: Fraction) -> "CertifiedReal":
        if radius < 0:
            raise ValueError("negative radius")
        return cls(mid - radius, mid + radius, op="ball")

    # -- enclosure access --------------------------------------------------

    @property
    def lo(self) -> Fraction:
        return self._lo

    @property
    def hi(self) -> Fraction:
        return self._hi

    def width(self) -> Fraction:
        return self._hi - self._lo

    def midpoint(self) -> Fraction:
        return (self._lo + self._hi) / 2

    # -- refinement --------------------------------------------------------

    def refine_to(self, width: Fraction, budget: Optional[int] = None) -> None:
        """Tighten the enclosure to at most `width` where the backend permits."""
        if self._hi - self._lo <= width:
            return
        cap = budget if budget is not None else precision_budget_bits()
        bits = max(self._bits * 2, _width_bits(width), 32)
        while True:
            self._refine_bits(min(bits, cap))
            if self._hi - self._lo <= width or bits >= cap:
                return
            bits *= 2

    def _refine_bits(self, bits: int) -> None:
        if bits <= self._bits:
            return
        self._bits = bits
        if self.exact is not None:
            if isinstance(self.exact, Fraction):
                self._lo = self._hi = self.exact
            else:
                lo, hi = ex_enclosure(self.exact, bits)
                self._set(lo, hi)
            return
        if self._op in ("leaf", "ball"):
            return  # saturating backends cannot tighten further
        for a in self._args:
            a._refine_bits(bits + 8)
        self._recompute()

    def _set(self, lo: Fraction, hi: Fraction) -> None:
        # enclosures only ever tighten
        self._lo = max(self._lo, lo)
        self._hi = min(self._hi, hi)

    def _recompute(self) -> None:
        op, args = self._op, self._args
        if op == "add":
            x, y = args
            self._set(x._lo + y._lo, x._hi + y._hi)
        elif op == "sub":
            x, y = args
            self._set(x._lo - y._hi, x._hi - y._lo)
        elif op == "mul":
            x, y = args
            cands = (x._lo * y._lo, x._lo * y._hi, x._hi * y._lo, x._hi * y._hi)
            self._set(min(cands), max(cands))
        elif op == "abs":
            (x,) = args
            if x._lo >= 0:
                self._set(x._lo, x._hi)
            elif x._hi <= 0:
                self._set(-x._hi, -x._lo)
            else:
                self._set(Fraction(0), max(-x._lo, x._hi))
        elif op == "max":
            self._set(max(a._lo for a in args), max(a._hi for a in args))
        else:
            raise AssertionError(f"unknown op {op}")

    # -- arithmetic (lazy nodes, exact payload propagated when possible) ----

    @staticmethod
    def _node(op: str, args: Sequence["CertifiedReal"], exact) -> "CertifiedReal":
        node = CertifiedReal(Fraction(-1), Fraction(1), exact=exact, op=op, args=args)
        node._lo, node._hi = -_INF, _INF
        node._recompute()
        if exact is not None and isinstance(exact, Fraction):
            node._lo = node._hi = exact
        return node

    def __add__(self, other: "CertifiedReal") -> "CertifiedReal":
        exact = None
        if self.exact is not None and other.exact is not None and ex_compatible(self.exact, other.exact):
            exact = ex_add(self.exact, other.exact)
        return self._node("add", (self, other), exact)

    def __sub__(self, other: "CertifiedReal") -> "CertifiedReal":
        exact = None
        if self.exact is not None and other.exact is not None and ex_compatible(self.exact, other.exact):
            exact = ex_sub(self.exact, other.exact)
        return self._node("sub", (self, other), exact)

    def __mul__(self, other: "CertifiedReal") -> "CertifiedReal":
        exact = None
        if self.exact is not None and other.exact is not None and ex_compatible(self.exact, other.exact):
            exact = ex_mul(self.exact, other.exact)
        return self._node("mul", (self, other), exact)

    def abs_(self) -> "CertifiedReal":
        exact = ex_abs(self.exact) if self.exact is not None else None
        return self._node("abs", (self,), exact)

    @classmethod
    def max_of(cls, items: Sequence["CertifiedReal"]) -> "CertifiedReal":
        """Maximum of the items; keeps an exact backend whenever the winner
        can be decided (cross-field winners are separated by refinement)."""
        best = items[0]
        for item in items[1:]:
            out = certified_compare(item, best, Fraction(1, 1 << 192))
            if out is Ordering.GREATER:
                best = item
            elif out is Ordering.TIE_UNDECIDED:
                return cls._node("max", tuple(items), None)
        return best

    def pow_int(self, n: int) -> "CertifiedReal":
        if n < 1:
            raise ValueError("positive powers only")
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def scaled(self, s: Fraction) -> "CertifiedReal":
        return self * CertifiedReal.from_exact(s)

    # -- decisions ----------------------------------------------------------

    def sign(self, budget: Optional[int] = None) -> int:
        """Exact sign; raises UndecidablePrecision if the enclosure saturates around 0."""
        if self.exact is not None:
            return ex_sign(self.exact)
        cap = budget if budget is not None else precision_budget_bits()
        bits = 32
        while True:
            if self._lo > 0:
                return 1
            if self._hi < 0:
                return -1
            if self._lo == self._hi == 0:
                return 0
            if bits >= cap:
                raise UndecidablePrecision(context="sign")
            bits = min(bits * 2, cap)
            self._refine_bits(bits)

    def floor(self, budget: Optional[int] = None) -> int:
        if self.exact is not None:
            return ex_floor(self.exact)
        cap = budget if budget is not None else precision_budget_bits()
        bits = 32
        while True:
            flo = self._lo.numerator // self._lo.denominator
            fhi = self._hi.numerator // self._hi.denominator
            if flo == fhi:
                return flo
            if bits >= cap:
                raise UndecidablePrecision(context="floor")
            bits = min(bits * 2, cap)
            self._refine_bits(bits)


_INF = Fraction(1 << 462, 1)


def certified_compare(
    a: CertifiedReal,
    b: CertifiedReal,
    max_width: Fraction,
    budget: Optional[int] = None,
) -> Ordering:
    """Three-way comparison, refusing to guess: overlapping enclosures that
    cannot be separated at max_width come back TIE_UNDECIDED."""
    if max_width <= 0:
        raise ValueError("max_width must be positive")
    if a.exact is not None and b.exact is not None and ex_compatible(a.exact, b.exact):
        s = ex_compare(a.exact, b.exact)
        return Ordering(s)
    target = max_width / 4
    for attempt in range(2):
        if a.hi < b.lo:
            return Ordering.LESS
        if a.lo > b.hi:
            return Ordering.GREATER
        if attempt == 0:
            a.refine_to(target, budget)
            b.refine_to(target, budget)
    return Ordering.TIE_UNDECIDED
