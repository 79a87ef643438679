"""Exception types raised across the package."""

from __future__ import annotations


class FairDivisionError(Exception):
    """Base class for every error raised by efxgraph."""


class InvalidInstance(FairDivisionError):
    pass


class InvalidAllocation(FairDivisionError):
    pass


class LexicographicNotNumeric(FairDivisionError):
    """A numeric quantity was requested from a comparison-only valuation."""


class ChoresUnsupported(FairDivisionError):
    pass


class NotAdditive(FairDivisionError):
    pass


class NotConsistent(FairDivisionError):
    pass


class NotLexicographic(FairDivisionError):
    pass


class TooLarge(FairDivisionError):
    pass


class BudgetExceeded(FairDivisionError):
    pass


class SearchExhausted(FairDivisionError):
    """A search whose success is guaranteed by an existence result came back empty."""


class BadSize(FairDivisionError):
    pass


class NotACover(FairDivisionError):
    pass


class OrderTooShort(FairDivisionError):
    pass


class DiameterTooSmall(FairDivisionError):
    pass


class RaggedRows(FairDivisionError):
    pass


class ShapeMismatch(FairDivisionError):
    """The graph/valuation profile does not have the structure a construction needs."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason
