"""Exception hierarchy shared by all modules."""


class MicRepError(Exception):
    """Base class for all library errors."""


class ValidationError(MicRepError):
    """Invalid input data (malformed operators, broken invariants)."""


class DimensionMismatch(ValidationError):
    pass


class FrameMismatch(ValidationError):
    """Operands are defined over different MIC-POVM frames."""


class SymmetryViolation(ValidationError):
    """Fiducial vectors do not satisfy the equiangularity condition."""


class FrameSingular(ValidationError):
    """Candidate effects are not linearly independent (Gram matrix not invertible)."""


class NotPositive(ValidationError):
    """An operator that must be positive semidefinite is not."""


class NotNormalized(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotTracePreserving(ValidationError):
    pass


class NotPseudoStochastic(ValidationError):
    """Matrix columns do not sum to one."""


class NotGeneratorShaped(ValidationError):
    """Matrix columns do not sum to zero."""


class NotUnitary(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class TargetOutOfRange(ValidationError):
    pass


class ComputationError(MicRepError):
    """A numerical procedure failed to produce a result."""


class InfeasibleParameters(ComputationError):
    """Optimization candidate cannot be mapped to a valid frame."""


class BracketNotFound(ComputationError):
    """Bisection could not establish a sign-changing bracket."""
