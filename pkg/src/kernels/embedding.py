"""
Spectral Embedding

Embeds training data with the eigenvectors of the double-centered kernel and
extends the embedding to unseen points through eigenfunctions:

- fit: K̆ = HKH, top-p eigenpairs with δ_k > eig_floor·δ_1
- embed_training: y_k(x_i) = √δ_k·v_ki
- embed_out_of_sample: y_k(x) = (1/√δ_k)·Σ_i v_ki·k̆(x_i, x)
- eigenfunction_value: f_k(x) = (√n/δ_k)·Σ_i v_ki·k̆(x_i, x), so f_k(x_i) = √n·v_ki
- operator_eigenvalue: λ_k = δ_k/n

The model keeps the UNcentered training Gram plus its row and grand means so
out-of-sample kernel columns can be centered against the training data.
The density-weighted inner product is not estimated; the uniform empirical
operator is used throughout.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NoPositiveSpectrum,
    OutOfSampleUnavailable,
    UsageError,
)
from ..state import DataMatrix, GramMatrix, KernelSpec
from .eigen import DEFAULT_MAX_SWEEPS, DEFAULT_TOL, eigh
from .gram_ops import center_columns, double_center, training_means
from .kernel_core import gram, gram_between

logger = logging.getLogger(__name__)

DEFAULT_EIG_FLOOR = 1e-10


@dataclass(frozen=True)
class EmbeddingModel:
    """
    Fitted spectral embedding.

    Attributes:
        gram: Uncentered training Gram matrix
        eigenvalues: δ_1 >= ... >= δ_p > 0
        eigenvectors: n×p matrix, column k is v_k
        row_means: Row means of the uncentered training Gram
        grand_mean: Grand mean of the uncentered training Gram
        spec: KernelSpec with gamma resolved, or None when fitted from a bare Gram
        training: Training data, or None when fitted from a bare Gram
        requested_p: Dimension asked for at fit time
    """
    gram: GramMatrix
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    row_means: np.ndarray
    grand_mean: float
    spec: Optional[KernelSpec] = None
    training: Optional[DataMatrix] = None
    requested_p: int = 0
    eig_floor: float = field(default=DEFAULT_EIG_FLOOR, compare=False)

    @property
    def n(self) -> int:
        return self.gram.n

    @property
    def p(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def d(self) -> Optional[int]:
        return self.training.d if self.training is not None else None

    @property
    def truncated(self) -> bool:
        return self.p < self.requested_p

    @property
    def supports_out_of_sample(self) -> bool:
        return self.spec is not None and self.training is not None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "d": self.d,
            "requested_p": self.requested_p,
            "truncated": self.truncated,
            "eigenvalues": self.eigenvalues.tolist(),
            "spec": self.spec.to_dict() if self.spec is not None else None,
        }


# =============================================================================
# Fitting
# =============================================================================

def fit(
    K: GramMatrix,
    p: int,
    *,
    spec: Optional[KernelSpec] = None,
    data: Optional[DataMatrix] = None,
    eig_floor: float = DEFAULT_EIG_FLOOR,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> EmbeddingModel:
    """
    Fit a spectral embedding of dimension p from an uncentered training Gram.

    Args:
        K: Uncentered training Gram
        p: Requested dimension, 1 <= p <= n
        spec: Kernel that produced K; needed for out-of-sample embedding
        data: Training data that produced K; needed for out-of-sample embedding
        eig_floor: Components need δ_k > eig_floor·δ_1
        tol: Eigensolver tolerance
        max_sweeps: Eigensolver sweep budget

    Returns:
        EmbeddingModel: With p possibly truncated to the number of positive eigenvalues

    Raises:
        NoPositiveSpectrum: If δ_1 <= 0 (e.g. a constant kernel)
    """
    if p < 1 or p > K.n:
        raise UsageError(f"embedding dimension p must be in 1..{K.n}, got {p}")
    if data is not None and data.n != K.n:
        raise DimensionMismatch(f"training data has {data.n} samples, Gram has order {K.n}")

    system = eigh(double_center(K).values, tol=tol, max_sweeps=max_sweeps)
    delta = system.eigenvalues
    if delta[0] <= 0:
        raise NoPositiveSpectrum(
            f"centered kernel has no positive eigenvalue (largest is {delta[0]!r})"
        )

    positive = int(np.count_nonzero(delta > eig_floor * delta[0]))
    kept = min(p, positive)
    if kept < p:
        logger.warning("embedding dimension truncated from %d to %d (rank bound)", p, kept)

    row_means, grand_mean = training_means(K)
    if spec is not None and data is not None:
        spec = spec.resolved(data.d)

    return EmbeddingModel(
        gram=K,
        eigenvalues=delta[:kept].copy(),
        eigenvectors=system.eigenvectors[:, :kept].copy(),
        row_means=row_means,
        grand_mean=grand_mean,
        spec=spec,
        training=data,
        requested_p=p,
        eig_floor=eig_floor,
    )


def fit_from_data(spec: KernelSpec, X: DataMatrix, p: int, **kwargs) -> EmbeddingModel:
    """Build the Gram of X under spec and fit; the model supports out-of-sample queries."""
    return fit(gram(spec, X), p, spec=spec, data=X, **kwargs)


# =============================================================================
# Embedding
# =============================================================================

def embed_training(model: EmbeddingModel) -> np.ndarray:
    """p×n matrix with y_k(x_i) = √δ_k·v_ki."""
    return np.sqrt(model.eigenvalues)[:, None] * model.eigenvectors.T


def _centered_columns(model: EmbeddingModel, X_t: DataMatrix) -> np.ndarray:
    if not model.supports_out_of_sample:
        raise OutOfSampleUnavailable(
            "model was fitted from a bare Gram matrix; kernel spec and training data are required"
        )
    if X_t.d != model.training.d:
        raise DimensionMismatch(
            f"query points have dimension {X_t.d}, training data has dimension {model.training.d}"
        )
    Kt = gram_between(model.spec, model.training, X_t)
    return center_columns(Kt, model.row_means, model.grand_mean)


def embed_out_of_sample_batch(model: EmbeddingModel, X_t: DataMatrix) -> np.ndarray:
    """
    Embed the columns of X_t.

    Returns:
        np.ndarray: p×n_t matrix

    Raises:
        DimensionMismatch: If X_t.d differs from the training dimension
        OutOfSampleUnavailable: If the model has no kernel spec or training data
    """
    centered = _centered_columns(model, X_t)
    return (model.eigenvectors.T @ centered) / np.sqrt(model.eigenvalues)[:, None]


def embed_out_of_sample(model: EmbeddingModel, x_t) -> np.ndarray:
    """
    Embed one point: y_k = (1/√δ_k)·Σ_i v_ki·k̆(x_i, x_t).

    Returns:
        np.ndarray: Length-p vector (empty when p = 0)
    """
    return embed_out_of_sample_batch(model, DataMatrix.from_vector(x_t))[:, 0]


# =============================================================================
# Eigenfunctions
# =============================================================================

def _check_index(model: EmbeddingModel, k: int) -> None:
    if not 1 <= k <= model.p:
        raise IndexOutOfRange(k, model.p)


def eigenfunction_value(model: EmbeddingModel, x, k: int) -> float:
    """
    f_k(x) = (√n/δ_k)·Σ_i v_ki·k̆(x_i, x), with 1-based k.

    At a training point x_i this equals √n·v_ki.

    Raises:
        IndexOutOfRange: Unless 1 <= k <= p
    """
    _check_index(model, k)
    centered = _centered_columns(model, DataMatrix.from_vector(x))[:, 0]
    v = model.eigenvectors[:, k - 1]
    return float(np.sqrt(model.n) / model.eigenvalues[k - 1] * (v @ centered))


def operator_eigenvalue(model: EmbeddingModel, k: int) -> float:
    """
    λ_k = δ_k/n, the eigenvalue of the empirical kernel operator.

    The same quantity is the k-th eigenvalue of the feature-space covariance.

    Raises:
        IndexOutOfRange: Unless 1 <= k <= p
    """
    _check_index(model, k)
    return float(model.eigenvalues[k - 1] / model.n)
