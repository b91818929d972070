"""Exception types shared across the package."""


class SdneigError(Exception):
    """Base class for all package errors."""


class InvalidVertexError(SdneigError, IndexError):
    """A vertex index is outside 0..n-1."""


class InvalidParameterError(SdneigError, ValueError):
    """A scalar parameter violates its constraint (e.g. c <= 0)."""


class InvalidInputError(SdneigError, ValueError):
    """An input matrix or vector violates a structural precondition."""


class DimensionMismatchError(SdneigError, ValueError):
    """Vector/matrix dimensions do not agree."""


class RangeViolationError(SdneigError, ValueError):
    """A matrix is wider than the network's communication range."""


class GenerationFailureError(SdneigError, RuntimeError):
    """Random graph generation exhausted its retry budget."""
