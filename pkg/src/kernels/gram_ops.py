"""
Gram Operations - Centering, Normalization, Validation, Factorization

Algebra on kernel matrices:
1. Centering - the centering matrix H, double-centering K̆ = HKH, and
   centering of out-of-sample kernel columns against training means
2. Distances - kernels from squared-distance matrices (classical MDS form)
   and back, plus an O(n³) triangle-inequality debug check
3. Normalization - cosine and generalized-mean normalization to a unit diagonal
4. Validation - Mercer report (symmetry and PSD under a relative tolerance)
5. Factorization - left-looking Cholesky with optional jitter

H is never formed for centering; row, column and grand means are subtracted
directly.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..errors import (
    DimensionMismatch,
    NonpositiveDiagonal,
    NotPositiveDefinite,
    UsageError,
)
from ..state import DataMatrix, DistanceMatrix, GramMatrix
from .eigen import eigh
from .kernel_core import pairwise_squared_distances

logger = logging.getLogger(__name__)

DEFAULT_PSD_TOL = 1e-8


@dataclass(frozen=True)
class MercerReport:
    """
    Result of checking the two Mercer conditions on a matrix.

    psd holds exactly when min_eigenvalue >= -tolerance_used·max(1, max_eigenvalue).
    """
    n: int
    symmetric: bool
    min_eigenvalue: float
    max_eigenvalue: float
    psd: bool
    tolerance_used: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "symmetric": self.symmetric,
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "psd": self.psd,
            "tolerance_used": self.tolerance_used,
        }


# =============================================================================
# 1. CENTERING
# =============================================================================

def centering_matrix(n: int) -> np.ndarray:
    """H = I - (1/n)·11ᵀ. Intended for tests and small n."""
    if n < 1:
        raise UsageError(f"centering matrix order must be >= 1, got {n}")
    return np.eye(n) - np.full((n, n), 1.0 / n)


def training_means(K: GramMatrix) -> tuple[np.ndarray, float]:
    """Row means and grand mean of an uncentered training Gram matrix."""
    row_means = K.values.mean(axis=1)
    return row_means, float(row_means.mean())


def center_columns(Kt, row_means: np.ndarray, grand_mean: float) -> np.ndarray:
    """
    Center kernel columns k(X_train, x_t) with precomputed training means.

    Args:
        Kt: n×n_t matrix or length-n vector of uncentered kernel values
        row_means: Row means of the uncentered training Gram
        grand_mean: Grand mean of the uncentered training Gram

    Returns:
        np.ndarray: Same shape as Kt

    Raises:
        DimensionMismatch: If Kt does not have n rows
    """
    Kt = np.asarray(Kt, dtype=np.float64)
    vector = Kt.ndim == 1
    columns = Kt[:, None] if vector else Kt
    if columns.ndim != 2 or columns.shape[0] != row_means.shape[0]:
        raise DimensionMismatch(
            f"test kernel has {columns.shape[0]} rows, training Gram has order {row_means.shape[0]}"
        )
    centered = columns - columns.mean(axis=0)[None, :] - row_means[:, None] + grand_mean
    return centered[:, 0] if vector else centered


def double_center(K: GramMatrix) -> GramMatrix:
    """
    Double-centered kernel K̆ = HKH.

    Every row and column of the result sums to zero up to rounding.
    """
    values = K.values
    row_means = values.mean(axis=1)
    col_means = values.mean(axis=0)
    grand_mean = float(row_means.mean())
    centered = values - row_means[:, None] - col_means[None, :] + grand_mean
    return GramMatrix.mirrored(centered, centered=True)


def center_out_of_sample(K: GramMatrix, Kt) -> np.ndarray:
    """
    Center out-of-sample kernel columns using the mean of the pulled training data.

    K̆_t = K_t - (1/n)1K_t - (1/n)K1 + (1/n²)1K1

    Args:
        K: UNcentered training Gram
        Kt: gram_between(spec, X_train, X_test), n×n_t (or a length-n vector)

    Raises:
        DimensionMismatch: If Kt row count != n
    """
    row_means, grand_mean = training_means(K)
    return center_columns(Kt, row_means, grand_mean)


# =============================================================================
# 2. DISTANCES
# =============================================================================

def squared_euclidean_distances(X: DataMatrix) -> DistanceMatrix:
    """DistanceMatrix of ||x_i - x_j||² over the columns of X."""
    return DistanceMatrix(pairwise_squared_distances(X, X))


def kernel_from_distance(D: Union[DistanceMatrix, np.ndarray]) -> GramMatrix:
    """
    Kernel from a squared-distance matrix, K = -½·HDH.

    Raises:
        InvalidDistanceMatrix: Asymmetry, nonzero diagonal or negative entries
            beyond 1e-10·max|D| (when a raw array is given)
    """
    if not isinstance(D, DistanceMatrix):
        D = DistanceMatrix(D)
    centered = double_center(GramMatrix(D.values)).values
    return GramMatrix.mirrored(-0.5 * centered, centered=True)


def distance_from_kernel(K: GramMatrix) -> DistanceMatrix:
    """
    Squared RKHS distances ||φ(x_i) - φ(x_j)||² = K(i,i) + K(j,j) - 2K(i,j).

    Negative values from rounding (or an indefinite K) are clipped to zero.
    """
    g = K.diagonal()
    values = g[:, None] + g[None, :] - 2.0 * K.values
    values = np.clip(values, 0.0, None)
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(values)


def check_triangle_inequality(
    D: DistanceMatrix,
    squared: bool = True,
    rtol: float = 1e-10,
) -> Optional[tuple[int, int, int]]:
    """
    O(n³) check that the underlying metric obeys d(i,j) <= d(i,k) + d(k,j).

    Args:
        D: Distance matrix
        squared: Whether D holds squared distances (the usual case)
        rtol: Slack relative to the largest distance

    Returns:
        The first violating (i, j, k), scanning k first, or None
    """
    metric = np.sqrt(D.values) if squared else D.values
    slack = rtol * float(np.max(metric)) if metric.size else 0.0
    for k in range(D.n):
        violation = metric[:, k][:, None] + metric[k, :][None, :] - metric < -slack
        if np.any(violation):
            i, j = np.argwhere(violation)[0]
            logger.debug("triangle inequality fails at (%d, %d) through %d", i, j, k)
            return int(i), int(j), k
    return None


# =============================================================================
# 3. NORMALIZATION
# =============================================================================

def _positive_diagonal(K: GramMatrix) -> np.ndarray:
    diagonal = K.diagonal()
    bad = np.flatnonzero(~(diagonal > 0))
    if bad.size:
        index = int(bad[0])
        raise NonpositiveDiagonal(index, float(diagonal[index]))
    return diagonal


def _generalized_mean(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    if t == 0:
        means = np.sqrt(a * b)
    else:
        means = ((a ** t + b ** t) / 2.0) ** (1.0 / t)
    # m_t(c, c) = c for every t
    return np.where(a == b, a, means)


def generalized_normalize(K: GramMatrix, t: float) -> GramMatrix:
    """
    Normalize K(i,j) by the generalized mean of K(i,i) and K(j,j).

    t = 0 is the geometric-mean limit (cosine normalization), t = 1 the
    arithmetic mean, t = -1 the harmonic mean. The diagonal of the result is
    exactly 1.

    Raises:
        NonpositiveDiagonal: With the first index whose K(i,i) <= 0
    """
    diagonal = _positive_diagonal(K)
    means = _generalized_mean(diagonal[:, None], diagonal[None, :], float(t))
    values = K.values / means
    np.fill_diagonal(values, 1.0)
    return GramMatrix.mirrored(values, centered=False)


def cosine_normalize(K: GramMatrix) -> GramMatrix:
    """K'(i,j) = K(i,j)/√(K(i,i)K(j,j)); identical to generalized_normalize(K, 0)."""
    return generalized_normalize(K, 0.0)


# =============================================================================
# 4. VALIDATION
# =============================================================================

def validate_mercer(
    K: Union[GramMatrix, np.ndarray],
    tol: float = DEFAULT_PSD_TOL,
    eig_tol: float = 1e-10,
    max_sweeps: int = 50,
) -> MercerReport:
    """
    Check symmetry and positive semi-definiteness.

    Findings are returned as data; an indefinite or asymmetric matrix is not
    an error. Eigenvalues are taken of the symmetric part (K + Kᵀ)/2.

    Args:
        K: Square matrix
        tol: Symmetry tolerance and relative PSD tolerance
        eig_tol: Eigensolver convergence tolerance
        max_sweeps: Eigensolver sweep budget

    Returns:
        MercerReport
    """
    values = K.values if isinstance(K, GramMatrix) else np.asarray(K, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise DimensionMismatch(f"validate_mercer needs a square matrix, got shape {values.shape}")

    asymmetry = float(np.max(np.abs(values - values.T))) if values.size else 0.0
    system = eigh((values + values.T) / 2.0, tol=eig_tol, max_sweeps=max_sweeps)
    max_eig = float(system.eigenvalues[0])
    min_eig = float(system.eigenvalues[-1])
    psd = min_eig >= -tol * max(1.0, max_eig)

    report = MercerReport(
        n=values.shape[0],
        symmetric=asymmetry <= tol,
        min_eigenvalue=min_eig,
        max_eigenvalue=max_eig,
        psd=psd,
        tolerance_used=tol,
    )
    logger.debug("validate_mercer: %s", report.to_dict())
    return report


# =============================================================================
# 5. FACTORIZATION
# =============================================================================

def cholesky(K: GramMatrix, jitter: float = 0.0) -> np.ndarray:
    """
    Lower-triangular L with LLᵀ = K + jitter·I.

    No automatic jitter escalation is performed.

    Args:
        K: Symmetric kernel
        jitter: Nonnegative ridge added to the diagonal

    Returns:
        np.ndarray: n×n lower-triangular factor with positive diagonal

    Raises:
        NotPositiveDefinite: At the first pivot <= 0, with its index
    """
    if jitter < 0:
        raise UsageError(f"jitter must be nonnegative, got {jitter!r}")
    n = K.n
    A = K.values + jitter * np.eye(n)
    L = np.zeros((n, n))
    for j in range(n):
        row = L[j, :j]
        pivot = A[j, j] - row @ row
        if not pivot > 0:
            raise NotPositiveDefinite(j, float(pivot))
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ row) / L[j, j]
    return L
