"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ContractError(TypeError):
    """A caller-supplied object does not provide what an operation needs."""


class AccuracyError(ArithmeticError):
    """A numerical procedure failed to reach its accuracy target.

    The best available estimate is kept on ``estimate`` so callers can
    decide whether it is still usable.
    """

    def __init__(self, message, estimate=None, error_estimate=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class InternalConsistencyError(ArithmeticError):
    """Two formulas that must agree exactly were found to disagree."""


class AccuracyWarning(UserWarning):
    """Result computed, but on inputs too coarse to trust the stated accuracy."""


class RangeError(OverflowError):
    """The result is not representable as a finite double."""
