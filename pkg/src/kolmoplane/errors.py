"""Exception hierarchy for kolmoplane.

Every error raised by the package derives from :class:`KolmoplaneError`, so
callers can catch the whole family with one clause.  Numerical failures carry
enough context (last residual, offending value) to be actionable.
"""


class KolmoplaneError(Exception):
    """Base class for all kolmoplane errors."""


class ValidationError(KolmoplaneError):
    """A model or configuration violates a structural requirement."""


class DomainError(KolmoplaneError):
    """A parameter point lies outside the model's validity radius."""


class NonFiniteError(KolmoplaneError):
    """An input or computed value is NaN or infinite."""


class CaseError(KolmoplaneError):
    """An operation was requested for the wrong degeneracy case."""


class ConvergenceError(KolmoplaneError):
    """An iterative solve failed to reach the requested residual."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class SideConditionError(KolmoplaneError):
    """A curve was queried outside the half-plane where it is defined."""


class BracketError(KolmoplaneError):
    """A one-dimensional root could not be bracketed inside the radius."""


class NotSingularError(KolmoplaneError):
    """The Jacobian has no eigenvalue close enough to zero."""


class DoubleZeroError(KolmoplaneError):
    """Both eigenvalues are near zero; the test point is too degenerate."""


class NotOnHopfCurveError(KolmoplaneError):
    """The equilibrium's eigenvalues are not close to a pure-imaginary pair."""


class StepUnderflowError(KolmoplaneError):
    """The adaptive integrator's step size collapsed below its floor."""


class IoError(KolmoplaneError):
    """Reading or writing an artifact failed."""
