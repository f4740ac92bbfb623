"""
Domain Types for Kernel Toolkit

Defines the immutable values that flow between the kernel modules:
- KernelSpec: which kernel and with what parameters (the single source of truth for k(x, y))
- DataMatrix: d×n samples stored column-wise, as in X ∈ R^{d×n}
- GramMatrix: symmetric n×n kernel matrix with a centering flag
- DistanceMatrix: symmetric, nonnegative, zero-diagonal n×n matrix of squared distances
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from .errors import DataFormatError, InvalidDistanceMatrix, NotSymmetric


def _readonly(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


# =============================================================================
# Kernel specification
# =============================================================================

class KernelFamily(str, Enum):
    """Supported kernel families."""
    LINEAR = "linear"
    RBF = "rbf"
    LAPLACIAN = "laplacian"
    SIGMOID = "sigmoid"
    POLYNOMIAL = "polynomial"
    COSINE = "cosine"
    CHI_SQUARED = "chi_squared"


# Families whose Gram matrices are positive semi-definite on any sample.
# Polynomial qualifies only with a nonnegative intercept, see KernelSpec.is_mercer.
MERCER_FAMILIES = frozenset({
    KernelFamily.LINEAR,
    KernelFamily.RBF,
    KernelFamily.LAPLACIAN,
    KernelFamily.COSINE,
    KernelFamily.CHI_SQUARED,
})

Gamma = Union[Literal["auto"], Annotated[float, Field(gt=0, allow_inf_nan=False)]]


class KernelSpec(BaseModel):
    """
    A kernel family plus its parameters.

    Attributes:
        family: Kernel family
        gamma: Positive scale, or "auto" which resolves to 1/d at evaluation time
        intercept: Additive constant c for sigmoid and polynomial kernels
        degree: Integer exponent for the polynomial kernel
        t: Generalized-mean exponent used by normalization
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: KernelFamily = KernelFamily.RBF
    gamma: Gamma = "auto"
    intercept: float = Field(default=1.0, allow_inf_nan=False)
    degree: PositiveInt = 3
    t: float = Field(default=0.0, allow_inf_nan=False)

    def resolve_gamma(self, d: int) -> float:
        """Return the numeric gamma for data of dimension d."""
        if self.gamma == "auto":
            return 1.0 / d
        return float(self.gamma)

    def resolved(self, d: int) -> "KernelSpec":
        """Return a copy whose gamma is numeric for dimension d."""
        if self.gamma != "auto":
            return self
        return self.model_copy(update={"gamma": self.resolve_gamma(d)})

    @property
    def is_mercer(self) -> bool:
        """True when every Gram matrix of this kernel is PSD."""
        if self.family == KernelFamily.POLYNOMIAL:
            return self.intercept >= 0
        return self.family in MERCER_FAMILIES

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")


# =============================================================================
# Matrices
# =============================================================================

@dataclass(frozen=True)
class DataMatrix:
    """
    Dense d×n matrix of finite reals; column i is sample x_i.

    Use `from_samples` for the tabular rows=samples layout.
    """
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise DataFormatError(f"data must be a 2-D array, got {values.ndim} dimensions")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise DataFormatError(f"data must have d >= 1 and n >= 1, got shape {values.shape}")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            feature, sample = (int(v) for v in bad[0])
            raise DataFormatError(
                f"non-finite value at sample {sample}, feature {feature}"
            )
        object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def from_samples(cls, rows) -> "DataMatrix":
        """Build from an n×d array whose rows are samples."""
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        return cls(rows.T)

    @classmethod
    def from_vector(cls, x) -> "DataMatrix":
        """Build a single-sample (d×1) matrix."""
        return cls(np.asarray(x, dtype=np.float64).reshape(-1, 1))

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def samples(self) -> np.ndarray:
        """n×d view with samples as rows."""
        return self.values.T


@dataclass(frozen=True)
class GramMatrix:
    """
    Symmetric n×n kernel matrix.

    Symmetry is exact: construct through `mirrored` or `from_array` when the
    source is only numerically symmetric.
    """
    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise DataFormatError(f"Gram matrix must be square and non-empty, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataFormatError("Gram matrix has non-finite entries")
        if not np.array_equal(values, values.T):
            raise NotSymmetric(float(np.max(np.abs(values - values.T))), 0.0)
        object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def mirrored(cls, values, centered: bool = False) -> "GramMatrix":
        """Copy the upper triangle onto the lower one and wrap."""
        values = np.asarray(values, dtype=np.float64)
        upper = np.triu(values)
        return cls(upper + np.triu(values, 1).T, centered=centered)

    @classmethod
    def from_array(cls, values, tol: float = 1e-10, centered: bool = False) -> "GramMatrix":
        """
        Wrap a numerically symmetric array.

        Args:
            values: Square array
            tol: Allowed asymmetry relative to max|values|
            centered: Whether the matrix is already double-centered

        Raises:
            NotSymmetric: If max|S - Sᵀ| exceeds tol·max(1, max|S|)
        """
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DataFormatError(f"Gram matrix must be square, got shape {values.shape}")
        asymmetry = float(np.max(np.abs(values - values.T))) if values.size else 0.0
        limit = tol * max(1.0, float(np.max(np.abs(values))) if values.size else 0.0)
        if asymmetry > limit:
            raise NotSymmetric(asymmetry, limit)
        return cls.mirrored(values, centered=centered)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def diagonal(self) -> np.ndarray:
        return np.diag(self.values).copy()


@dataclass(frozen=True)
class DistanceMatrix:
    """
    Symmetric matrix of squared distances d²ᵢⱼ with zero diagonal.

    Validation tolerance is relative: rtol·max|D|.
    """
    values: np.ndarray
    rtol: float = field(default=1e-10, repr=False, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise InvalidDistanceMatrix(f"distance matrix must be square, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidDistanceMatrix("distance matrix has non-finite entries")

        limit = self.rtol * float(np.max(np.abs(values)))
        asymmetry = np.abs(values - values.T)
        if np.max(asymmetry) > limit:
            i, j = np.unravel_index(int(np.argmax(asymmetry)), asymmetry.shape)
            raise InvalidDistanceMatrix(
                f"distance matrix is asymmetric at ({i}, {j}): "
                f"{values[i, j]!r} vs {values[j, i]!r}"
            )
        diagonal = np.abs(np.diag(values))
        if np.max(diagonal) > limit:
            i = int(np.argmax(diagonal))
            raise InvalidDistanceMatrix(f"distance matrix diagonal entry {i} is {values[i, i]!r}, expected 0")
        if np.min(values) < -limit:
            i, j = np.unravel_index(int(np.argmin(values)), values.shape)
            raise InvalidDistanceMatrix(f"distance matrix entry ({i}, {j}) is negative: {values[i, j]!r}")

        values = np.triu(values, 1)
        values = np.clip(values + values.T, 0.0, None)
        object.__setattr__(self, "values", _readonly(values))

    @property
    def n(self) -> int:
        return self.values.shape[0]
