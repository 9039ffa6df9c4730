"""Shared report dataclasses and deterministic JSON serialization.

Conventions: sorted keys, big integers as decimal strings, rationals as
"num/den" strings, enclosures as [lo, hi] pairs. Every certified check
returns a small report object rather than a bare bool so the CLI can emit
the first failing index and inequality by name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, is_dataclass
from fractions import Fraction
from typing import Any, Optional

SCHEMA = "dioph-report/1"


@dataclass(frozen=True)
class BoundReport:
    """Outcome of certifying one family of inequalities over a sequence."""

    name: str
    checked: int
    passed: bool
    first_violation: Optional[int] = None
    violated_bound: Optional[str] = None
    notes: tuple[str, ...] = ()

    def require(self) -> "BoundReport":
        from .errors import InternalCertificateFailure

        if not self.passed:
            raise InternalCertificateFailure(
                self.name,
                f"index {self.first_violation}"
                + (f" bound {self.violated_bound}" if self.violated_bound else ""),
            )
        return self


def json_value(x: Any) -> Any:
    """Convert report payloads to deterministic JSON-safe values."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return x if abs(x) < (1 << 53) else str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        return x
    if is_dataclass(x) and not isinstance(x, type):
        return {f.name: json_value(getattr(x, f.name)) for f in fields(x)}
    if isinstance(x, dict):
        return {str(k): json_value(v) for k, v in sorted(x.items())}
    if isinstance(x, (list, tuple)):
        return [json_value(v) for v in x]
    enc = getattr(x, "lo", None)
    if enc is not None and hasattr(x, "hi"):
        return [json_value(x.lo), json_value(x.hi)]
    return str(x)


def dump_json(obj: Any) -> str:
    payload = {"schema": SCHEMA, "body": json_value(obj)}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
