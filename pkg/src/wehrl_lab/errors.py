"""Exception types shared across the package."""


class WehrlLabError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(WehrlLabError, ValueError):
    """Amplitude vector length does not match 2j+1."""


class NonFinite(WehrlLabError, ValueError):
    """A NaN or infinite component where a finite number is required."""


class ZeroVector(WehrlLabError, ValueError):
    """Operation requires a nonzero state vector."""


class SpinMismatch(WehrlLabError, ValueError):
    """Two states with different spin labels were combined."""


class BadGridSize(WehrlLabError, ValueError):
    """Quadrature grid sizes must be at least 2."""


class InvalidPair(WehrlLabError, ValueError):
    """(j, m) is not a valid spin/magnetic-label pair."""


class BadExponent(WehrlLabError, ValueError):
    """Moment exponent out of range (p must be positive)."""


class BadStep(WehrlLabError, ValueError):
    """Finite-difference step out of range."""


class DomainError(WehrlLabError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class WrongSpin(WehrlLabError, ValueError):
    """Operation defined only for a specific spin value."""


class NoConvergence(WehrlLabError, RuntimeError):
    """Iteration budget exhausted before reaching the requested tolerance."""
