"""Exception vocabulary shared by all qcheat modules.

Validation problems (bad arguments, wrong domain kind, non-monotone data)
raise :class:`DomainError`; failures of the numerics at runtime (a window
leaving a non-periodic domain, a vanishing denominator, a grid too coarse
to resolve what was asked) raise the more specific subclasses so the CLI
can map them to its exit codes.
"""


class QcheatError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(QcheatError, ValueError):
    """Invalid argument or precondition violation (validation failure)."""


class CoverageError(QcheatError):
    """A quadrature window leaves a non-periodic data domain.

    Carries the offending window so messages can name the missing range.
    """

    def __init__(self, message, missing=None):
        super().__init__(message)
        self.missing = missing


class SingularDenominatorError(QcheatError, ArithmeticError):
    """The denominator of the dilatation ratio fell below threshold."""

    def __init__(self, message, x=None, y=None, magnitude=None):
        super().__init__(message)
        self.x = x
        self.y = y
        self.magnitude = magnitude


class ResolutionError(QcheatError):
    """The grid is too coarse for the requested operation."""


class ProbeFailure(QcheatError):
    """A holomorphy probe could not find a safe evaluation disk."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node
