"""Exception hierarchy.

The CLI maps these onto exit codes: :class:`ValidationError` and
:class:`ConvergenceError` are invalid input (2); :class:`AssumptionError`
subclasses mean the theory does not apply to the instance (3).
"""


class WalkbenchError(Exception):
    pass


class ValidationError(WalkbenchError, ValueError):
    """Input violates a structural invariant (stochasticity, symmetry, ...)."""


class ConvergenceError(WalkbenchError, RuntimeError):
    """An iterative generator hit its iteration cap."""


class FeasibilityError(ValidationError):
    """No noise matrix of the requested norm keeps P + E nonnegative."""


class AssumptionError(WalkbenchError):
    """The instance falls outside the regime where a formula is defined."""


class ReducibilityError(AssumptionError):
    pass


class DivergentPhaseError(AssumptionError):
    pass


class BoundInapplicableError(AssumptionError):
    pass


class SpectralTheoremViolation(WalkbenchError, AssertionError):
    """An eigenphase of a walk operator matched no discriminant eigenvalue."""
