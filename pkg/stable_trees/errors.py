from __future__ import annotations


class StableTreesError(Exception):
    """Base error for every failure raised by the stable tree toolkit."""


class ConfigurationError(StableTreesError):
    """Raised when environment configuration is missing or malformed."""


class ParameterError(StableTreesError, ValueError):
    """Raised when a model or run parameter is outside its valid range."""


class DomainError(StableTreesError, ValueError):
    """Raised when the stable exponent is evaluated outside Re(z) <= 0."""


class QuadratureError(StableTreesError):
    """Raised when a numerical integral does not reach its tolerance."""

    def __init__(self, message: str, estimate: float, error_estimate: float) -> None:
        super().__init__(
            f"{message} (estimate={estimate:.6g}, error estimate={error_estimate:.3g})"
        )
        self.estimate = estimate
        self.error_estimate = error_estimate


class SupportCapError(StableTreesError):
    """Raised when a convolution needs mass beyond its support cap."""


class CodewordError(StableTreesError, ValueError):
    """Raised when a Prufer codeword has entries outside [n]."""


class TreeStructureError(StableTreesError, ValueError):
    """Raised when a parent array does not describe a rooted tree."""


class InvariantViolationError(StableTreesError):
    """Raised when a growth or line-breaking invariant fails."""


class UnknownSuiteError(StableTreesError, KeyError):
    """Raised when a verification suite name is not registered."""
