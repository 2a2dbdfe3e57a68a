"""Exception types raised by the library.

Granular classes let callers (notably the CLI) distinguish invalid inputs
from numeric-resolution failures such as aliasing.
"""


class ToepformsError(Exception):
    """Base class for all library errors."""


class InvalidMeasureError(ToepformsError):
    """Raised when measure data violates its invariants (negative density,
    duplicate atoms, bad JSON schema, ...)."""


class GridResolutionError(ToepformsError):
    """Raised when the quadrature grid cannot resolve a requested frequency
    (aliasing) or is otherwise too coarse."""


class InsufficientCutoffError(ToepformsError):
    """Raised when a coefficient sequence is too short for the requested
    operation."""


class InsufficientMomentsError(ToepformsError):
    """Raised when a moment sequence is too short for the requested form."""


class QuadratureDegreeError(ToepformsError):
    """Raised when an explicitly requested quadrature rule cannot integrate
    the requested moment degree exactly."""


class NotApplicableError(ToepformsError):
    """Raised when an operation's structural precondition fails, e.g. a
    witness construction on a measure without point masses."""


class NumericalError(ToepformsError):
    """Raised when an internal consistency guard trips, e.g. a supposedly
    real form value with a large imaginary residue."""
