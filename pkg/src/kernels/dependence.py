"""
Dependence and Discrepancy Statistics

- HSIC: tr(K_x H K_y H)/(n-1)² between paired samples, computed as the
  elementwise inner product of the two double-centered kernels
- MMD²: biased (V-statistic) squared maximum mean discrepancy,
  mean(K_xx) + mean(K_yy) - 2·mean(K_xy)

Statistics only; no permutation tests or p-values.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import OrderMismatch, ShapeMismatch, TooFewSamples
from ..state import DataMatrix, GramMatrix, KernelSpec
from .gram_ops import double_center
from .kernel_core import gram, gram_between

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairedKernels:
    """Gram matrices over paired samples (x_i, y_i) of X and Y."""
    Kx: GramMatrix
    Ky: GramMatrix

    def __post_init__(self):
        if self.Kx.n != self.Ky.n:
            raise OrderMismatch(
                f"paired kernels must have the same order, got {self.Kx.n} and {self.Ky.n}"
            )

    @property
    def n(self) -> int:
        return self.Kx.n


@dataclass(frozen=True)
class MMDResult:
    """An MMD² value with the sample sizes it was computed from."""
    value: float
    n: int
    m: int
    estimator: str = "biased"

    @property
    def unequal_sizes(self) -> bool:
        return self.n != self.m

    def to_dict(self) -> dict:
        return {
            "mmd2": self.value,
            "n": self.n,
            "m": self.m,
            "unequal_sizes": self.unequal_sizes,
            "estimator": self.estimator,
        }


def hsic(pk: PairedKernels) -> float:
    """
    Empirical Hilbert-Schmidt Independence Criterion.

    Returns:
        float: tr(K_x H K_y H)/(n-1)²

    Raises:
        TooFewSamples: If n < 2
    """
    n = pk.n
    if n < 2:
        raise TooFewSamples(f"HSIC needs at least 2 paired samples, got {n}")
    centered_x = double_center(pk.Kx).values
    centered_y = double_center(pk.Ky).values
    return float(np.sum(centered_x * centered_y) / (n - 1) ** 2)


def _as_block(values) -> np.ndarray:
    values = values.values if isinstance(values, GramMatrix) else np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ShapeMismatch(f"kernel block must be 2-D, got {values.ndim} dimensions")
    return values


def mmd2(Kxx, Kyy, Kxy) -> float:
    """
    Biased squared MMD between samples X (n) and Y (m).

    Unequal sizes use per-block means.

    Args:
        Kxx: n×n kernel over X
        Kyy: m×m kernel over Y
        Kxy: n×m cross kernel

    Raises:
        ShapeMismatch: If the block shapes are inconsistent
    """
    Kxx, Kyy, Kxy = _as_block(Kxx), _as_block(Kyy), _as_block(Kxy)
    n, m = Kxx.shape[0], Kyy.shape[0]
    if Kxx.shape != (n, n) or Kyy.shape != (m, m) or Kxy.shape != (n, m):
        raise ShapeMismatch(
            f"inconsistent kernel blocks: Kxx {Kxx.shape}, Kyy {Kyy.shape}, Kxy {Kxy.shape}"
        )
    if n == 0 or m == 0:
        raise TooFewSamples("MMD needs at least one sample on each side")
    return float(Kxx.mean() + Kyy.mean() - 2.0 * Kxy.mean())


def hsic_from_samples(
    spec_x: KernelSpec,
    X: DataMatrix,
    Y: DataMatrix,
    spec_y: Optional[KernelSpec] = None,
) -> float:
    """HSIC of paired samples; Y uses spec_x unless spec_y is given."""
    if X.n != Y.n:
        raise OrderMismatch(f"paired samples must have equal counts, got {X.n} and {Y.n}")
    return hsic(PairedKernels(gram(spec_x, X), gram(spec_y or spec_x, Y)))


def mmd2_from_samples(spec: KernelSpec, X: DataMatrix, Y: DataMatrix) -> MMDResult:
    """
    MMD² of two samples under one kernel.

    Gamma "auto" resolves against the shared dimension so all three blocks use
    the same kernel.
    """
    spec = spec.resolved(X.d)
    value = mmd2(gram(spec, X), gram(spec, Y), gram_between(spec, X, Y))
    result = MMDResult(value=value, n=X.n, m=Y.n)
    if result.unequal_sizes:
        logger.warning("mmd2: unequal sample sizes n=%d, m=%d; using per-block means", X.n, Y.n)
    return result
