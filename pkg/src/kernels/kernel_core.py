"""
Kernel Core - Kernel Evaluation and Gram Matrices

Evaluates the seven supported kernel families on single pairs, on one dataset
(the Gram matrix K(i, j) = k(x_i, x_j)), and between two datasets (the n1×n2
kernel of the kernel trick).

Distance-based kernels (rbf, laplacian, chi_squared) form the coordinate
differences explicitly and only then square/sum them; the expansion
||x||² + ||y||² - 2xᵀy is never used because it cancels catastrophically for
nearby points.
"""

import logging

import numpy as np

from ..errors import DimensionMismatch, DomainViolation
from ..state import DataMatrix, GramMatrix, KernelFamily, KernelSpec

logger = logging.getLogger(__name__)

# Upper bound on the elements of one d×rows×n2 difference block
_BLOCK_ELEMENTS = 1 << 22


# =============================================================================
# Domain checks
# =============================================================================

def _first_column_where(mask: np.ndarray) -> int | None:
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else None


def _offending_pair(bad_left: int | None, bad_right: int | None) -> tuple[int, int]:
    """First (row-major) index pair touching a bad column on either side."""
    candidates = []
    if bad_left is not None:
        candidates.append((bad_left, 0))
    if bad_right is not None:
        candidates.append((0, bad_right))
    return min(candidates)


def _check_domain(spec: KernelSpec, left: np.ndarray, right: np.ndarray) -> None:
    if spec.family == KernelFamily.CHI_SQUARED:
        bad_left = _first_column_where(np.any(left < 0, axis=0))
        bad_right = _first_column_where(np.any(right < 0, axis=0))
        if bad_left is not None or bad_right is not None:
            raise DomainViolation(
                "chi_squared kernel requires nonnegative coordinates",
                _offending_pair(bad_left, bad_right),
            )
    elif spec.family == KernelFamily.COSINE:
        bad_left = _first_column_where(~np.any(left != 0, axis=0))
        bad_right = _first_column_where(~np.any(right != 0, axis=0))
        if bad_left is not None or bad_right is not None:
            raise DomainViolation(
                "cosine kernel is undefined for the zero vector",
                _offending_pair(bad_left, bad_right),
            )


# =============================================================================
# Pairwise evaluation
# =============================================================================

def _block_rows(d: int, n2: int) -> int:
    return max(1, _BLOCK_ELEMENTS // max(1, d * n2))


def _difference_reduce(left: np.ndarray, right: np.ndarray, reducer) -> np.ndarray:
    """Apply reducer(diff, left_block) to d×rows×n2 difference blocks."""
    d, n1 = left.shape
    n2 = right.shape[1]
    out = np.empty((n1, n2), dtype=np.float64)
    rows = _block_rows(d, n2)
    for start in range(0, n1, rows):
        stop = min(n1, start + rows)
        block = left[:, start:stop, None]
        diff = block - right[:, None, :]
        out[start:stop] = reducer(diff, block)
    return out


def _squared_euclidean(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return _difference_reduce(left, right, lambda diff, _: np.einsum("krj,krj->rj", diff, diff))


def _manhattan(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return _difference_reduce(left, right, lambda diff, _: np.abs(diff).sum(axis=0))


def _chi_squared_distance(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    def reduce(diff, block):
        denominator = block + right[:, None, :]
        terms = np.zeros_like(diff)
        # x(j) + y(j) = 0 only when both are 0; that term is defined as 0
        np.divide(diff * diff, denominator, out=terms, where=denominator != 0)
        return terms.sum(axis=0)

    return _difference_reduce(left, right, reduce)


def _pairwise(spec: KernelSpec, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Kernel values between the columns of left (d×n1) and right (d×n2)."""
    _check_domain(spec, left, right)
    gamma = spec.resolve_gamma(left.shape[0])
    family = spec.family

    if family == KernelFamily.LINEAR:
        return left.T @ right
    if family == KernelFamily.RBF:
        return np.exp(-gamma * _squared_euclidean(left, right))
    if family == KernelFamily.LAPLACIAN:
        return np.exp(-gamma * _manhattan(left, right))
    if family == KernelFamily.SIGMOID:
        return np.tanh(gamma * (left.T @ right) + spec.intercept)
    if family == KernelFamily.POLYNOMIAL:
        return (gamma * (left.T @ right) + spec.intercept) ** spec.degree
    if family == KernelFamily.COSINE:
        norms_left = np.linalg.norm(left, axis=0)
        norms_right = np.linalg.norm(right, axis=0)
        return (left.T @ right) / np.outer(norms_left, norms_right)
    if family == KernelFamily.CHI_SQUARED:
        return np.exp(-gamma * _chi_squared_distance(left, right))
    raise ValueError(f"unknown kernel family {family!r}")


# =============================================================================
# Public operations
# =============================================================================

def eval_kernel(spec: KernelSpec, x, y) -> float:
    """
    Evaluate k(x, y) for two vectors.

    Args:
        spec: Kernel specification
        x: Vector of length d
        y: Vector of length d

    Returns:
        float: Kernel value

    Raises:
        DimensionMismatch: If len(x) != len(y)
        DomainViolation: Negative input to chi_squared, zero vector to cosine
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DimensionMismatch(f"vectors have lengths {x.size} and {y.size}")
    left = DataMatrix.from_vector(x).values
    right = DataMatrix.from_vector(y).values
    return float(_pairwise(spec, left, right)[0, 0])


def gram(spec: KernelSpec, X: DataMatrix) -> GramMatrix:
    """
    Gram matrix K(i, j) = k(x_i, x_j) over the columns of X.

    The upper triangle is mirrored onto the lower one, so the result is
    exactly symmetric.

    Raises:
        DomainViolation: With the first offending index pair
    """
    logger.debug("gram: family=%s d=%d n=%d", spec.family.value, X.d, X.n)
    K = _pairwise(spec, X.values, X.values)
    return GramMatrix.mirrored(K, centered=False)


def gram_between(spec: KernelSpec, X1: DataMatrix, X2: DataMatrix) -> np.ndarray:
    """
    Kernel matrix between two datasets, entry (i, j) = k(x_{1,i}, x_{2,j}).

    Gamma "auto" resolves against the shared dimension d. With n2 = 1 this is
    the kernel vector k(X, x_t) used for out-of-sample points.

    Returns:
        np.ndarray: n1×n2 matrix (not symmetric in general)

    Raises:
        DimensionMismatch: If X1.d != X2.d
    """
    if X1.d != X2.d:
        raise DimensionMismatch(f"datasets have dimensions {X1.d} and {X2.d}")
    return _pairwise(spec, X1.values, X2.values)


def pairwise_squared_distances(X1: DataMatrix, X2: DataMatrix) -> np.ndarray:
    """n1×n2 matrix of ||x_{1,i} - x_{2,j}||², from explicit differences."""
    if X1.d != X2.d:
        raise DimensionMismatch(f"datasets have dimensions {X1.d} and {X2.d}")
    return _squared_euclidean(X1.values, X2.values)


def kernel_diagonal(spec: KernelSpec, X: DataMatrix) -> np.ndarray:
    """Self-similarities k(x_i, x_i) without forming the n×n matrix."""
    values = X.values
    _check_domain(spec, values, values)
    gamma = spec.resolve_gamma(X.d)
    squared_norms = np.einsum("ki,ki->i", values, values)

    if spec.family == KernelFamily.LINEAR:
        return squared_norms
    if spec.family == KernelFamily.SIGMOID:
        return np.tanh(gamma * squared_norms + spec.intercept)
    if spec.family == KernelFamily.POLYNOMIAL:
        return (gamma * squared_norms + spec.intercept) ** spec.degree
    # rbf, laplacian, chi_squared and cosine are all 1 on the diagonal
    return np.ones(X.n)


def rkhs_distance(spec: KernelSpec, x, y) -> float:
    """
    Distance between the pulled points in the RKHS.

    ||φ(x) - φ(y)||² = k(x, x) + k(y, y) - 2k(x, y); rounding below zero is clipped.
    """
    squared = eval_kernel(spec, x, x) + eval_kernel(spec, y, y) - 2.0 * eval_kernel(spec, x, y)
    return float(np.sqrt(max(squared, 0.0)))
