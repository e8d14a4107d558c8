"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a function is defined."""


class DataError(ValueError):
    """User-supplied data (e.g. boundary values) evaluated to a non-finite number."""


class QuadratureError(RuntimeError):
    """An exterior integral failed to reach the requested tolerance."""


class AssemblyError(RuntimeError):
    """Raised when one entry of a collocation system cannot be computed.

    ``row`` and ``col`` name the offending (test point, center) pair; ``col`` is
    ``None`` when the failure happened on the right-hand side.
    """

    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class ConditioningError(ArithmeticError):
    """A dense system is numerically singular.

    The 2-norm condition estimate is kept on the exception so callers can
    still report it.
    """

    def __init__(self, message, cond_estimate=float("inf")):
        super().__init__(message)
        self.cond_estimate = cond_estimate
