class WavekitError(Exception):
    """Base class for all package errors."""


class DomainError(WavekitError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class ConvergenceError(WavekitError, ArithmeticError):
    """A series, extrapolation or quadrature failed its own accuracy test."""


class ValidationError(WavekitError):
    """Independent routes that must agree did not."""


class ConfigError(WavekitError, ValueError):
    """A CLI configuration is malformed; the message names the field."""
