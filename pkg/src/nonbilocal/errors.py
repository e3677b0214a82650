"""Exception hierarchy shared across the package."""


class QuantumError(Exception):
    """Base class for all library-specific failures."""


class NotHermitian(QuantumError):
    """Matrix fails the Hermiticity check."""


class NotPSD(QuantumError):
    """Matrix has an eigenvalue below the clamping tolerance."""


class NotNormalized(QuantumError):
    """Vector or coefficient list is not normalized."""


class DimensionMismatch(QuantumError):
    """Operand shapes are inconsistent with the declared subsystem dims."""


class NumericalFailure(QuantumError):
    """An underlying numerical routine did not converge."""


class InvalidWeights(QuantumError):
    """Mixture weights are negative or do not sum to one."""


class OutOfRange(QuantumError):
    """Parameter outside its admissible interval."""


class InvalidMeasurement(QuantumError):
    """Projector set is not a complete orthogonal rank-1 measurement."""


class DegenerateMarginal(QuantumError):
    """Closed form requires a nondegenerate marginal spectrum."""
