"""Exception types shared across the package.

Every failure mode that callers are expected to catch gets its own class;
anything else is a plain bug and surfaces as a standard exception.
"""


class WrightcertError(Exception):
    """Base class for all package-specific errors."""


class DivByZeroSpan(WrightcertError):
    """Interval division by an interval containing zero."""


class DomainError(WrightcertError):
    """Elementary function evaluated outside its supported domain."""


class ArgumentError(WrightcertError):
    """Malformed or out-of-contract argument."""


class HypothesisViolation(WrightcertError):
    """An analytic hypothesis (truncation size, decay exponent, parameter
    window) required by the estimate being computed does not hold."""


class SingularMidpoint(WrightcertError):
    """The midpoint matrix could not be inverted numerically."""


class NoConvergence(WrightcertError):
    """Iterative solver failed to reach the requested residual."""


class EmptyIntersection(WrightcertError):
    """Cross-order Fourier coefficient bounds are inconsistent."""


class DegenerateDimension(WrightcertError):
    """Attempt to bisect a zero-width coordinate."""


class ShapeMismatch(WrightcertError):
    """Operands have incompatible dimensions or metadata."""


class IndexOutOfRange(WrightcertError):
    """Mode or coordinate index outside the valid range."""
