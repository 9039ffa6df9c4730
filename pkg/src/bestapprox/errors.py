"""Shared exception types.

Every error that names a certificate or precondition carries the name of the
failed inequality so CLI exit paths can report it verbatim.
"""

from __future__ import annotations


class BestApproxError(Exception):
    """Base class for all package errors."""


class DependentInput(BestApproxError):
    """Two vectors expected to be independent are parallel."""


class UndecidablePrecision(BestApproxError):
    """A comparison stayed undecided after exhausting the precision budget."""

    def __init__(self, message: str = "", *, context: str = ""):
        super().__init__(message or "comparison undecided at precision budget")
        self.context = context


class TieDetected(BestApproxError):
    """Two exactly equal values where the theory requires strictness.

    Signals a rational or rationally dependent target.
    """

    def __init__(self, message: str = "", *, q_pair: tuple[int, int] | None = None):
        super().__init__(message or "exact tie detected")
        self.q_pair = q_pair


class PreconditionViolated(BestApproxError):
    """A named hypothesis of a lemma or operation does not hold."""

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        self.detail = detail
        super().__init__(f"precondition {name} violated" + (f": {detail}" if detail else ""))


class InternalCertificateFailure(BestApproxError):
    """A theorem-backed certificate failed: indicates a bug, not bad input."""

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        self.detail = detail
        super().__init__(f"certificate {name} failed" + (f": {detail}" if detail else ""))


class NotPrimitive(BestApproxError):
    """Vector coordinates share a common factor > 1."""


class NotSpanning(BestApproxError):
    """A sequence lies in a proper subspace up to the computed bound."""


class NoIndependentTriple(BestApproxError):
    """No three consecutive vectors in the range are linearly independent."""


class StepTooLarge(BestApproxError):
    """Construction integers exceeded the configured bit budget."""


class InsufficientDepth(BestApproxError):
    """The certified box is too wide for the requested digit count."""


class DomainError(BestApproxError):
    """Argument outside the mathematical domain of the operation."""
