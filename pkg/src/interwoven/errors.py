"""Exception hierarchy shared by the numerical modules and the CLI."""


class InterwovenError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(InterwovenError, ValueError):
    """An argument lies outside the domain where the formula is defined."""


class NoBoundLevel(InterwovenError):
    """The light-particle level has merged with the continuum (a < 0, R >= |a|).

    ``radius`` is the merge radius |a|.
    """

    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class MissingReference(InterwovenError, KeyError):
    """No tabulated exact three-body scaling factor exists for a mass ratio."""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing reference value"


class InsufficientLevels(InterwovenError):
    """Fewer bound levels exist than an operation requires."""


class ConstraintViolation(InterwovenError):
    """An assembled spectrum violates one of its ordering constraints."""


class SolverError(InterwovenError, RuntimeError):
    """A root finder or eigenvalue search failed to converge."""


class IllConditionedFit(UserWarning):
    """Warning: a least-squares fit is numerically ill-conditioned."""
