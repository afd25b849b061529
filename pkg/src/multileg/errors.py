"""Exception hierarchy."""


class MultilegError(Exception):
    """Base class for all errors raised by this package."""


class SolverError(MultilegError):
    """A solver could not produce a valid solution."""


class NoSupport(SolverError):
    """The springs cannot carry the weight, or the body topples."""


class SingularSupport(SolverError):
    """Contact points are collinear or coincident; the 3x3 support system is singular."""


class DegenerateTilt(SolverError):
    """The tilt direction is undefined (centre of mass on the contact point or line)."""


class NoConvergence(SolverError):
    """Iteration cap reached without meeting the stopping rule."""


class SingularBalance(SolverError):
    """The planar balance matrix is rank deficient."""


class ZeroVelocity(MultilegError):
    """Exact Coulomb friction is undefined at zero slip."""


class DegenerateFit(MultilegError):
    """All predictions are zero, so no scale factor can be fitted."""


class LengthMismatch(MultilegError):
    """Two logs that must be aligned have different lengths."""


class InsufficientData(MultilegError):
    """Too few usable samples to identify a parameter."""

    def __init__(self, message, legs=()):
        super().__init__(message)
        self.legs = tuple(legs)
