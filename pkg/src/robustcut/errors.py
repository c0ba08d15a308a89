"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class RobustCutError(Exception):
    """Base class for all errors raised by robustcut."""


class ValidationError(RobustCutError, ValueError):
    """Problem data violates a structural invariant."""


class DimensionMismatch(ValidationError):
    pass


class NotSPD(ValidationError):
    """A covariance matrix is not symmetric positive-definite.

    ``index`` is the 0-based position of the offending uncertain
    constraint, or ``None`` when the matrix was factorized standalone.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class UnboundedBox(ValidationError):
    pass


class NegativeBeta(ValidationError):
    pass


class NumericalBreakdown(RobustCutError):
    """The simplex method hit its pivot limit; rescale the instance."""


class NodeLimitExceeded(RobustCutError):
    pass


class DegeneratePoint(RobustCutError, ArithmeticError):
    """x'Σx vanishes at the query point, so no supporting cut exists."""


class NoCutGenerated(RobustCutError):
    pass


class NoFeasibleGridPoint(RobustCutError):
    pass


class NoFeasiblePoint(RobustCutError):
    pass


class LatticeTooLarge(RobustCutError):
    pass


class ParseError(RobustCutError, ValueError):
    pass
