"""Exception types shared across the package."""


class CloneboundError(Exception):
    """Base class for all clonebound errors."""


class NonSquareError(CloneboundError):
    """Operator expected to be square is not."""


class NotHermitianError(CloneboundError):
    """Hermiticity residual exceeds tolerance."""


class NotPSDError(CloneboundError):
    """An eigenvalue falls below the positive-semidefinite floor."""


class TraceNotOneError(CloneboundError):
    """Trace deviates from 1 beyond tolerance."""


class DimensionMismatchError(CloneboundError):
    """Operands live on incompatible spaces."""


class InvalidEffectError(CloneboundError):
    """Measurement operator is not Hermitian with spectrum in [0, 1]."""


class ArityError(CloneboundError):
    """State-set size does not match the requested bound."""


class RangeError(CloneboundError):
    """Numeric argument outside its admissible range."""


class DegenerateFidelityError(CloneboundError):
    """Requested overlap is unreachable because the states are orthogonal."""


class DegenerateStatesError(CloneboundError):
    """Operation undefined for identical states."""


class NonUnitaryError(CloneboundError):
    """Unitarity residual exceeds tolerance."""


class ProblemFormatError(CloneboundError):
    """Problem file failed to parse; message carries the offending field path."""
