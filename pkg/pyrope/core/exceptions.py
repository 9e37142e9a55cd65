"""Custom exceptions for the pyrope library."""


class RopeError(Exception):
    """Base exception for all pyrope errors."""

    pass


class ShapeError(RopeError, ValueError):
    """Exception raised when array dimensions or lengths do not match."""

    pass


class ConfigurationError(RopeError, ValueError):
    """Exception raised when a variant, mask kind or config value is invalid."""

    pass


class DegenerateRowError(RopeError):
    """Exception raised when an attention row has no visible entry."""

    pass


class InputError(RopeError, ValueError):
    """Exception raised when an analysis receives unusable input."""

    pass
