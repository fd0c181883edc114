"""Exception types shared across the package."""


class DwlabError(Exception):
    """Base class for all package errors."""


class StabilityError(DwlabError):
    """Raised when |theta| >= 1 or |rho| >= 1."""


class DomainError(DwlabError):
    """Raised when a numeric argument lies outside its admissible domain."""


class DegenerateError(DwlabError):
    """Raised when a denominator sum is zero (all-zero path)."""


class SingularError(DwlabError):
    """Raised when the joint covariance matrix is singular (theta = -rho)."""


class InsufficientEventsError(DwlabError):
    """Raised on demand when a tail estimate rests on fewer than 10 events.

    Deviation suites flag such estimates instead of dropping them; this
    exception exists for callers that want to treat the flag as fatal.
    """
