"""Exception hierarchy for shiftbounds.

Every error raised deliberately by this package derives from
:class:`ShiftBoundsError`, so callers can catch one type at the boundary.
The subclasses also derive from the matching builtin (ValueError,
ArithmeticError, RuntimeError) to stay friendly to generic handlers.
"""

from __future__ import annotations


class ShiftBoundsError(Exception):
    """Base class for all shiftbounds errors."""


class DomainError(ShiftBoundsError, ValueError):
    """An argument lies outside the mathematical domain of an operation.

    Examples: negative shift magnitude, alpha outside (0, 1), NaN input.
    """


class ShapeError(ShiftBoundsError, ValueError):
    """Array dimensions or structure are malformed or inconsistent."""


class DefinitenessError(ShiftBoundsError, ValueError):
    """A matrix required to be symmetric positive definite is not."""


class NumericError(ShiftBoundsError, ArithmeticError):
    """An iterative numeric routine failed to converge or lost its invariant.

    Raised by the eigensolver, simplex, quadrature and incomplete-gamma
    iterations on hitting their caps, and by internal cross-checks that
    disagree beyond tolerance.
    """


class InsufficientHitsError(ShiftBoundsError, RuntimeError):
    """A conditional Monte Carlo estimate has too few conditioning hits."""


class InsufficientMassError(ShiftBoundsError, RuntimeError):
    """A Monte Carlo ratio denominator has too little estimated mass."""


class ConfigError(ShiftBoundsError, ValueError):
    """A run configuration is invalid; the message names the field path."""
