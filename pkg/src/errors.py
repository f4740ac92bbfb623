"""
Kernel Toolkit Errors

Every failure the library can raise, grouped into three categories that the
command-line front end maps onto exit codes:

- UsageError (exit 1): bad parameters, out-of-range indices
- DataError (exit 2): malformed or inconsistent inputs
- NumericalError (exit 3): a computation could not complete
"""

from typing import Optional


class KernelToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 2

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


class UsageError(KernelToolkitError):
    """Raised when the caller asked for something that cannot be served."""

    exit_code = 1


class DataError(KernelToolkitError):
    """Raised when input data violates a precondition."""

    exit_code = 2


class NumericalError(KernelToolkitError):
    """Raised when a numerical procedure fails on valid input."""

    exit_code = 3


# =============================================================================
# Data errors
# =============================================================================

class DataFormatError(DataError):
    """A file could not be parsed. Carries the location of the bad cell."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        row: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.path = path
        self.row = row
        self.column = column
        location = []
        if path is not None:
            location.append(f"file {path}")
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        prefix = ", ".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DimensionMismatch(DataError):
    """Two operands disagree on a dimension."""


class DomainViolation(DataError):
    """A kernel was evaluated outside its domain (e.g. chi-squared on negatives)."""

    def __init__(self, message: str, index_pair: Optional[tuple[int, int]] = None):
        self.index_pair = index_pair
        if index_pair is not None:
            message = f"{message} (pair {index_pair[0]}, {index_pair[1]})"
        super().__init__(message)


class InvalidDistanceMatrix(DataError):
    """A distance matrix is asymmetric, negative, or has a nonzero diagonal."""


class NonpositiveDiagonal(DataError):
    """Normalization needs strictly positive self-similarities."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(
            f"diagonal entry {index} is {value!r}; normalization requires K(i,i) > 0"
        )


class NotSymmetric(DataError):
    """A matrix required to be symmetric is not, beyond tolerance."""

    def __init__(self, asymmetry: float, tolerance: float):
        self.asymmetry = asymmetry
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not symmetric: max |S(i,j) - S(j,i)| = {asymmetry:.3e} "
            f"exceeds {tolerance:.3e}"
        )


class ShapeMismatch(DataError):
    """Kernel blocks handed to a statistic have inconsistent shapes."""


class OrderMismatch(DataError):
    """Paired Gram matrices have different orders."""


class TooFewSamples(DataError):
    """A statistic needs more samples than were given."""


class CorruptModel(DataError):
    """A saved model file is unreadable or internally inconsistent."""


class VersionMismatch(DataError):
    """A saved model was written by an incompatible format version."""


# =============================================================================
# Usage errors
# =============================================================================

class ConfigError(UsageError):
    """Run configuration is invalid or inconsistent."""


class IndexOutOfRange(UsageError):
    """A 1-based component index is outside [1, p]."""

    def __init__(self, index: int, upper: int):
        self.index = index
        self.upper = upper
        super().__init__(f"index {index} is out of range; valid indices are 1..{upper}")


class TooManyLandmarks(UsageError):
    """More landmarks were requested than samples exist."""


class InvalidLandmarks(UsageError):
    """Landmark indices are duplicated or outside [0, n)."""


class OutOfSampleUnavailable(UsageError):
    """The model was fitted without a kernel spec and training data."""


# =============================================================================
# Numerical errors
# =============================================================================

class NoConvergence(NumericalError):
    """The Jacobi eigensolver ran out of sweeps."""

    def __init__(self, sweeps: int, residual: float, target: float):
        self.sweeps = sweeps
        self.residual = residual
        self.target = target
        super().__init__(
            f"eigensolver did not converge after {sweeps} sweeps: "
            f"off-diagonal norm {residual:.3e} > target {target:.3e}"
        )


class NotPositiveDefinite(NumericalError):
    """Cholesky hit a nonpositive pivot."""

    def __init__(self, pivot_index: int, pivot_value: float):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"matrix is not positive definite: pivot {pivot_index} is {pivot_value!r}"
        )


class NoPositiveSpectrum(NumericalError):
    """Every eigenvalue of a centered kernel is at or below the floor."""


class NonpositiveEigenvalue(NumericalError):
    """An eigenvalue used as a divisor is not positive."""
