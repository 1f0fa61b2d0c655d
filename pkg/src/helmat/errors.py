"""Exception types shared across the package."""


class HelmatError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(HelmatError, ValueError):
    """Operands have incompatible dimensions."""


class HermitianError(HelmatError, ValueError):
    """Input matrix is not Hermitian within the construction tolerance."""


class NotPositiveDefiniteError(HelmatError, ValueError):
    """Matrix has an eigenvalue at or below the positive-definiteness threshold."""


class SingularMatrixError(HelmatError, ValueError):
    """Matrix is numerically singular where an invertible one is required."""


class SpectralDomainError(HelmatError, ValueError):
    """A scalar function is undefined at one of the eigenvalues it is applied to."""


class EigenDecompositionError(HelmatError, RuntimeError):
    """The eigensolver failed to converge or produced an invalid factorisation."""


class InternalConsistencyError(HelmatError, RuntimeError):
    """A quantity that is nonnegative in exact arithmetic came out negative
    beyond the roundoff tolerance."""


class QuadratureError(HelmatError, RuntimeError):
    """Adaptive quadrature failed to converge within the node budget."""


class UnsupportedObjectiveError(HelmatError, ValueError):
    """No squared distance is associated with the requested mean kind."""
