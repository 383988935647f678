"""Exception types shared across the package."""

from __future__ import annotations


class AnnuityBoundsError(Exception):
    """Base class for every error raised by this package."""


class LifeTableParseError(AnnuityBoundsError):
    """Malformed life-table document; ``row`` is the 1-based data row index."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class MissingHeader(LifeTableParseError):
    """The CSV document does not start with the ``age,lx`` header."""


class NonConsecutiveAges(LifeTableParseError):
    """Ages are not consecutive integers."""


class NonPositiveCount(LifeTableParseError):
    """A survivor count is zero, negative, or not a finite number."""


class IncreasingCount(LifeTableParseError):
    """A survivor count exceeds the count at the previous age."""


class InvalidParameter(AnnuityBoundsError):
    """A parameter violates the documented preconditions."""


class AgeOutOfRange(AnnuityBoundsError):
    """The requested ages are not covered by the life table."""


class HorizonExceeded(AnnuityBoundsError):
    """Evaluation time lies beyond the available survival horizon."""


class NonPositiveFund(AnnuityBoundsError):
    """Fund value must be strictly positive for pricing."""


class GridTooCoarse(AnnuityBoundsError):
    """Policy iteration failed to converge on the supplied grid."""


class NonIntegerMaturity(AnnuityBoundsError):
    """The PDE engine requires an integer maturity equal to the horizon."""


class GridMismatch(AnnuityBoundsError):
    """Inputs were produced on different discretization grids."""


class InconsistentGrid(AnnuityBoundsError):
    """Simulated paths do not cover the requested contract horizon."""


class DualNotConverged(AnnuityBoundsError):
    """Multiplier search hit its iteration cap; ``best`` holds the best iterate."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ConfigInvalid(AnnuityBoundsError):
    """A run configuration failed validation."""


class SolverFailure(AnnuityBoundsError):
    """A numerical routine failed while executing a run configuration."""
