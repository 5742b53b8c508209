"""Exception types shared across the package."""


class PhysarumError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrixError(PhysarumError):
    """Pivoting found no usable pivot while solving a linear system."""


class SingularLaplacianError(PhysarumError):
    """The weighted Gram matrix of the constraint matrix could not be solved.

    Cannot occur for a valid full-row-rank instance with positive capacities;
    raised only when the numerics fail.
    """


class InfeasibleShapeError(PhysarumError):
    """Instance has fewer columns than independent rows, or an inconsistent
    dependent row."""


class KernelCostViolation(PhysarumError):
    """The zero-cost columns are linearly dependent, i.e. some nonzero kernel
    vector has zero cost."""


class NegativeCostError(PhysarumError):
    """Cost vector has a negative entry."""


class SizeCapError(PhysarumError):
    """An exact enumeration would exceed the configured size cap."""


class InfeasibleError(PhysarumError):
    """No feasible basic solution exists."""


class NonPositiveCapacityError(PhysarumError):
    """A discrete step drove some capacity to zero or below; the step size is
    too large for the current state."""


class EnvelopeViolation(PhysarumError):
    """A continuous trajectory sample left its theoretical envelope
    (diagnostic; usually means the integration step is too coarse)."""


class NotStronglyDominatingError(PhysarumError):
    """The starting point has alpha <= 0 and no step plan exists for it."""


class DecompositionFailure(PhysarumError):
    """Internal failure while decomposing or rounding a feasible vector;
    signals an implementation bug for genuinely feasible input."""


class PreconditionViolated(PhysarumError):
    """An operation was called with input outside its stated precondition."""


class DegenerateGraphError(PhysarumError):
    """A generated graph instance has no source-sink connection."""
