"""
Nystrom Approximation

Low-rank completion of a kernel matrix from m landmark columns.

With landmarks L and remaining indices R, the kernel splits into
A = K[L, L] (m×m), B = K[L, R] (m×(n-m)) and C = K[R, R]. Only A and B are
computed; C is approximated by BᵀA⁺B where A⁺ is an eigenvalue-thresholded
pseudo-inverse. Landmarks may be any index set; results are permuted back to
the original index order.

Kernel entries come from a KernelProvider, which serves columns on demand so a
data-backed provider evaluates m·n entries (plus the diagonal for pivoting),
never the full n×n matrix.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Protocol, Sequence, Union, runtime_checkable

import numpy as np

from ..errors import (
    DimensionMismatch,
    InvalidLandmarks,
    NonpositiveEigenvalue,
    TooManyLandmarks,
    UsageError,
)
from ..state import DataMatrix, GramMatrix, KernelSpec
from .eigen import eigh
from .kernel_core import gram_between, kernel_diagonal

logger = logging.getLogger(__name__)

DEFAULT_PINV_THRESHOLD = 1e-10
# Residual pivots at or below this times the largest diagonal count as exhausted
PIVOT_FLOOR = 1e-12

Strategy = Literal["uniform", "greedy_pivot"]


# =============================================================================
# Kernel providers
# =============================================================================

@runtime_checkable
class KernelProvider(Protocol):
    """Serves kernel columns and the diagonal without materializing K."""

    @property
    def n(self) -> int: ...

    def columns(self, indices: Sequence[int]) -> np.ndarray:
        """n×len(indices) block K[:, indices]."""
        ...

    def diagonal(self) -> np.ndarray: ...


class MatrixProvider:
    """Provider over an already computed Gram matrix (tests, small n)."""

    def __init__(self, K: Union[GramMatrix, np.ndarray]):
        self.K = K if isinstance(K, GramMatrix) else GramMatrix.from_array(K)

    @property
    def n(self) -> int:
        return self.K.n

    def columns(self, indices: Sequence[int]) -> np.ndarray:
        return self.K.values[:, np.asarray(indices, dtype=np.intp)]

    def diagonal(self) -> np.ndarray:
        return self.K.diagonal()


class DataKernelProvider:
    """
    Provider that evaluates kernel entries from data on demand.

    Fetched columns are cached, so greedy pivoting followed by `build` pays for
    each landmark column once. `evaluations` counts the kernel entries computed
    so far.
    """

    def __init__(self, spec: KernelSpec, X: DataMatrix):
        self.spec = spec.resolved(X.d)
        self.X = X
        self.evaluations = 0
        self._columns: dict[int, np.ndarray] = {}

    @property
    def n(self) -> int:
        return self.X.n

    def columns(self, indices: Sequence[int]) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.intp).ravel().tolist()
        missing = [i for i in dict.fromkeys(indices) if i not in self._columns]
        if missing:
            landmarks = DataMatrix(self.X.values[:, missing])
            fetched = gram_between(self.spec, self.X, landmarks)
            self.evaluations += self.X.n * len(missing)
            for j, i in enumerate(missing):
                self._columns[i] = fetched[:, j]
        if not indices:
            return np.zeros((self.X.n, 0))
        return np.column_stack([self._columns[i] for i in indices])

    def diagonal(self) -> np.ndarray:
        self.evaluations += self.X.n
        return kernel_diagonal(self.spec, self.X)


# =============================================================================
# Landmark selection
# =============================================================================

def _greedy_pivot(provider: KernelProvider, m: int) -> np.ndarray:
    """Pivoted partial Cholesky: repeatedly take the largest residual diagonal."""
    n = provider.n
    residual = np.array(provider.diagonal(), dtype=np.float64)
    floor = PIVOT_FLOOR * max(float(residual.max()), 0.0)
    factors = np.zeros((n, m))
    available = np.ones(n, dtype=bool)
    picked = []

    for j in range(m):
        scores = np.where(available, residual, -np.inf)
        i = int(np.argmax(scores))
        pivot = residual[i]
        picked.append(i)
        available[i] = False
        logger.debug("greedy_pivot: step %d picks %d (residual %.3e)", j, i, pivot)

        if pivot <= floor:
            # residual exhausted; later picks only complete the index set
            continue
        column = provider.columns([i])[:, 0]
        f = (column - factors[:, :j] @ factors[i, :j]) / np.sqrt(pivot)
        factors[:, j] = f
        residual = residual - f * f
        residual[i] = 0.0

    return np.array(picked, dtype=np.intp)


def select_landmarks(
    source: Union[KernelProvider, int],
    m: int,
    strategy: Strategy = "uniform",
    seed: int = 0,
) -> np.ndarray:
    """
    Choose m distinct landmark indices.

    Args:
        source: KernelProvider, or the sample count n (uniform only)
        m: Landmark count, 1 <= m <= n
        strategy: "uniform" draws without replacement from default_rng(seed),
            returned sorted; "greedy_pivot" maximizes the residual diagonal of a
            pivoted partial Cholesky, returned in pick order
        seed: Generator seed (uniform)

    Returns:
        np.ndarray: m distinct indices in [0, n)

    Raises:
        TooManyLandmarks: If m > n
    """
    n = source if isinstance(source, (int, np.integer)) else source.n
    if m < 1:
        raise UsageError(f"landmark count m must be >= 1, got {m}")
    if m > n:
        raise TooManyLandmarks(f"requested {m} landmarks but only {n} samples exist")

    if strategy == "uniform":
        rng = np.random.default_rng(seed)
        return np.sort(rng.choice(n, size=m, replace=False)).astype(np.intp)
    if strategy == "greedy_pivot":
        if isinstance(source, (int, np.integer)):
            raise UsageError("greedy_pivot needs a kernel provider, not just a sample count")
        return _greedy_pivot(source, m)
    raise UsageError(f"unknown landmark strategy {strategy!r}")


# =============================================================================
# Model
# =============================================================================

@dataclass(frozen=True)
class NystromModel:
    """
    Landmark partition of a kernel.

    Attributes:
        n: Full order
        landmark_indices: Sorted, distinct landmark indices
        rest_indices: The remaining indices, sorted
        A: m×m landmark-landmark block (exactly symmetric)
        B: m×(n-m) landmark-rest block
        A_pinv: Thresholded pseudo-inverse of A
        pinv_threshold: Eigenvalues of A at or below this times λ_max(A) were dropped
        landmark_eigenvalues: Retained eigenvalues of A
        landmark_eigenvectors: m×r eigenvectors matching landmark_eigenvalues
    """
    n: int
    landmark_indices: np.ndarray
    rest_indices: np.ndarray
    A: np.ndarray
    B: np.ndarray
    A_pinv: np.ndarray
    pinv_threshold: float
    landmark_eigenvalues: np.ndarray
    landmark_eigenvectors: np.ndarray

    @property
    def m(self) -> int:
        return self.landmark_indices.shape[0]

    @property
    def rank(self) -> int:
        return self.landmark_eigenvalues.shape[0]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "rank": self.rank,
            "landmarks": self.landmark_indices.tolist(),
            "pinv_threshold": self.pinv_threshold,
        }


def _mirror(values: np.ndarray) -> np.ndarray:
    return np.triu(values) + np.triu(values, 1).T


def build(
    provider: KernelProvider,
    landmark_indices: Sequence[int],
    pinv_threshold: float = DEFAULT_PINV_THRESHOLD,
) -> NystromModel:
    """
    Fetch the landmark columns and form A, B and A⁺.

    Args:
        provider: Source of kernel columns
        landmark_indices: Distinct indices in [0, n), any order
        pinv_threshold: Relative eigenvalue cutoff for the pseudo-inverse

    Raises:
        InvalidLandmarks: Empty, duplicated or out-of-range indices
    """
    n = provider.n
    indices = np.asarray(landmark_indices, dtype=np.intp).ravel()
    if indices.size == 0:
        raise InvalidLandmarks("at least one landmark is required")
    if indices.min() < 0 or indices.max() >= n:
        raise InvalidLandmarks(f"landmark indices must lie in [0, {n}), got {indices.tolist()}")
    indices = np.sort(indices)
    duplicates = indices[1:][indices[1:] == indices[:-1]]
    if duplicates.size:
        raise InvalidLandmarks(f"duplicate landmark index {int(duplicates[0])}")

    C = provider.columns(indices)
    rest = np.setdiff1d(np.arange(n, dtype=np.intp), indices)
    A = _mirror(C[indices, :])
    B = C[rest, :].T.copy()

    system = eigh(A)
    delta = system.eigenvalues
    cutoff = pinv_threshold * delta[0] if delta[0] > 0 else np.inf
    keep = delta > cutoff
    values = delta[keep]
    vectors = system.eigenvectors[:, keep]
    A_pinv = _mirror((vectors / values) @ vectors.T)
    if values.size < indices.size:
        logger.debug("nystrom: landmark block rank %d of %d", values.size, indices.size)

    return NystromModel(
        n=n,
        landmark_indices=indices,
        rest_indices=rest,
        A=A,
        B=B,
        A_pinv=A_pinv,
        pinv_threshold=pinv_threshold,
        landmark_eigenvalues=values,
        landmark_eigenvectors=vectors,
    )


# =============================================================================
# Completion and diagnostics
# =============================================================================

def complete(model: NystromModel) -> GramMatrix:
    """
    Assemble K̃ = [[A, B], [Bᵀ, BᵀA⁺B]] in original index order.

    The landmark blocks of K̃ equal A and B exactly.
    """
    L, R = model.landmark_indices, model.rest_indices
    K = np.empty((model.n, model.n))
    K[np.ix_(L, L)] = model.A
    K[np.ix_(L, R)] = model.B
    K[np.ix_(R, L)] = model.B.T
    K[np.ix_(R, R)] = _mirror(model.B.T @ model.A_pinv @ model.B)
    return GramMatrix(K)


def nystrom_features(model: NystromModel) -> np.ndarray:
    """
    Factor O (r×n) with OᵀO = K̃.

    Landmark columns hold R = Σ^{1/2}Uᵀ and the rest S = Σ^{-1/2}UᵀB, where
    UΣUᵀ is the retained eigendecomposition of A.
    """
    U = model.landmark_eigenvectors
    sigma = model.landmark_eigenvalues
    O = np.empty((model.rank, model.n))
    O[:, model.landmark_indices] = np.sqrt(sigma)[:, None] * U.T
    O[:, model.rest_indices] = (U.T @ model.B) / np.sqrt(sigma)[:, None]
    return O


def reconstruction_error(K, K_tilde) -> float:
    """
    Relative Frobenius error ||K - K̃||_F / ||K||_F.

    A zero K gives 0 when K̃ is also zero and inf otherwise.

    Raises:
        DimensionMismatch: If the orders differ
    """
    K = K.values if isinstance(K, GramMatrix) else np.asarray(K, dtype=np.float64)
    K_tilde = K_tilde.values if isinstance(K_tilde, GramMatrix) else np.asarray(K_tilde, dtype=np.float64)
    if K.shape != K_tilde.shape:
        raise DimensionMismatch(f"cannot compare matrices of shapes {K.shape} and {K_tilde.shape}")
    difference = float(np.linalg.norm(K - K_tilde))
    scale = float(np.linalg.norm(K))
    if scale == 0:
        return 0.0 if difference == 0 else float("inf")
    return difference / scale


def nystrom_eigenfunction(lambda_k: float, f_at_samples, k_vec) -> float:
    """
    Nystrom estimate of an eigenfunction at a query point.

    f_k(x) ≈ (1/(n·λ_k))·Σ_i k(x_i, x)·f_k(x_i)

    Args:
        lambda_k: Operator eigenvalue, > 0
        f_at_samples: f_k at the n samples
        k_vec: k(x_i, x) for the query x

    Raises:
        NonpositiveEigenvalue: If lambda_k <= 0
    """
    if not lambda_k > 0:
        raise NonpositiveEigenvalue(f"eigenvalue must be positive, got {lambda_k!r}")
    f = np.asarray(f_at_samples, dtype=np.float64).ravel()
    k_vec = np.asarray(k_vec, dtype=np.float64).ravel()
    if f.shape != k_vec.shape:
        raise DimensionMismatch(f"eigenfunction has {f.size} samples, kernel vector has {k_vec.size}")
    return float(k_vec @ f / (f.size * lambda_k))
