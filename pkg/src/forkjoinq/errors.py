"""Exception types shared across the package."""


class ForkJoinError(Exception):
    """Base class for all package errors."""


class DomainError(ForkJoinError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class InstabilityError(ForkJoinError, ValueError):
    """The queue is unstable (rho >= 1) for a formula that requires rho < 1."""


class InapplicableError(ForkJoinError, ValueError):
    """A bound or formula does not apply to the given queue specification."""


class CacheFormatError(ForkJoinError, ValueError):
    """A coefficient cache file is malformed.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
