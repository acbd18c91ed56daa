class LPolyError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LPolyError, ValueError):
    """Bad user input: non-prime characteristic, degree too large, malformed text."""


class ComputationError(LPolyError):
    """A computation could not be completed within its resource limits."""


class CeilingExceeded(ComputationError):
    """Field enumeration would exceed the configured element ceiling."""


class PrecisionError(ComputationError):
    """p-adic precision budget exhausted, or a certificate could not be met."""


class NotDivisibleError(LPolyError, ArithmeticError):
    """Exact division requested where the divisor does not divide."""
