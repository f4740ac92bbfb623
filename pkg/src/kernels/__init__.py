"""
Kernels package for the kernel toolkit.

Exports the library operations for easy importing.
"""

from .kernel_core import (
    eval_kernel,
    gram,
    gram_between,
    kernel_diagonal,
    pairwise_squared_distances,
    rkhs_distance,
)
from .gram_ops import (
    MercerReport,
    center_columns,
    center_out_of_sample,
    centering_matrix,
    check_triangle_inequality,
    cholesky,
    cosine_normalize,
    distance_from_kernel,
    double_center,
    generalized_normalize,
    kernel_from_distance,
    squared_euclidean_distances,
    training_means,
    validate_mercer,
)
from .eigen import EigenSystem, eigh, evd_factorize
from .embedding import (
    EmbeddingModel,
    eigenfunction_value,
    embed_out_of_sample,
    embed_out_of_sample_batch,
    embed_training,
    fit,
    fit_from_data,
    operator_eigenvalue,
)
from .nystrom import (
    DataKernelProvider,
    KernelProvider,
    MatrixProvider,
    NystromModel,
    build,
    complete,
    nystrom_eigenfunction,
    nystrom_features,
    reconstruction_error,
    select_landmarks,
)
from .dependence import (
    MMDResult,
    PairedKernels,
    hsic,
    hsic_from_samples,
    mmd2,
    mmd2_from_samples,
)

__all__ = [
    # Kernel Core
    "eval_kernel",
    "gram",
    "gram_between",
    "kernel_diagonal",
    "pairwise_squared_distances",
    "rkhs_distance",
    # Gram Operations
    "MercerReport",
    "center_columns",
    "center_out_of_sample",
    "centering_matrix",
    "check_triangle_inequality",
    "cholesky",
    "cosine_normalize",
    "distance_from_kernel",
    "double_center",
    "generalized_normalize",
    "kernel_from_distance",
    "squared_euclidean_distances",
    "training_means",
    "validate_mercer",
    # Eigen
    "EigenSystem",
    "eigh",
    "evd_factorize",
    # Embedding
    "EmbeddingModel",
    "eigenfunction_value",
    "embed_out_of_sample",
    "embed_out_of_sample_batch",
    "embed_training",
    "fit",
    "fit_from_data",
    "operator_eigenvalue",
    # Nystrom
    "DataKernelProvider",
    "KernelProvider",
    "MatrixProvider",
    "NystromModel",
    "build",
    "complete",
    "nystrom_eigenfunction",
    "nystrom_features",
    "reconstruction_error",
    "select_landmarks",
    # Dependence
    "MMDResult",
    "PairedKernels",
    "hsic",
    "hsic_from_samples",
    "mmd2",
    "mmd2_from_samples",
]
