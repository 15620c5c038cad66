"""Exception types raised across the package."""


class WaveChaosError(ValueError):
    """Base class for all package errors."""


class DomainError(WaveChaosError):
    """An exponent or parameter lies outside its admissible range."""


class UnsupportedFamilyError(WaveChaosError):
    """The requested covariance family is not handled by this routine."""


class ConfigurationError(WaveChaosError):
    """A configuration block or option combination is invalid."""


class PreconditionError(WaveChaosError):
    """A documented precondition on an input does not hold."""


class CriticalityError(WaveChaosError):
    """A second-moment computation was requested outside its regime."""
