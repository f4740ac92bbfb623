"""
Kernel Toolkit Command-Line Front End

Batch commands over CSV datasets (rows = samples, columns = features):

    gram           kernel matrix of one dataset, or between two (--input2)
    center         double-center a kernel, or center a test kernel (--test-kernel)
    normalize      cosine or generalized-mean normalization (--method)
    validate       Mercer report: symmetry, eigenvalue extremes, PSD, Cholesky
    from-distance  kernel from a (squared) distance matrix
    embed          spectral embedding of training data (--p), optional --save-model
    oos-embed      embed new points with a saved model (--model)
    nystrom        landmark completion of the kernel (--m, --strategy, --seed)
    hsic           dependence between paired datasets (--input2)
    mmd            discrepancy between two samples (--input2)
    eig            eigenvalues (and --vectors) of a symmetric matrix

Each successful run writes its result plus a JSON metadata sidecar. Exit codes:
0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import __version__
from .audit import RunAudit, RunEventType
from .config import COMMANDS, RunConfig, build_run_config
from .data_io import load_data, load_square, load_table, write_json, write_matrix, write_report
from .errors import (
    ConfigError,
    DataError,
    DimensionMismatch,
    IndexOutOfRange,
    KernelToolkitError,
    NotPositiveDefinite,
    NotSymmetric,
    NumericalError,
    UsageError,
)
from .kernels import (
    DataKernelProvider,
    build,
    center_out_of_sample,
    check_triangle_inequality,
    cholesky,
    complete,
    cosine_normalize,
    double_center,
    eigenfunction_value,
    eigh,
    embed_out_of_sample_batch,
    embed_training,
    fit_from_data,
    generalized_normalize,
    gram,
    gram_between,
    hsic_from_samples,
    kernel_from_distance,
    mmd2_from_samples,
    reconstruction_error,
    select_landmarks,
    validate_mercer,
)
from .persistence import load_model, save_model
from .state import DataMatrix, DistanceMatrix, GramMatrix

logger = logging.getLogger(__name__)

ORIENTATION = "rows=samples; transposed internally to d×n (columns=samples)"


@dataclass
class CommandResult:
    """What a command produced: a matrix or a report, plus sidecar details."""
    payload: Union[np.ndarray, dict]
    details: dict = field(default_factory=dict)

    @property
    def is_report(self) -> bool:
        return isinstance(self.payload, dict)


# =============================================================================
# Argument parsing
# =============================================================================

class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting with code 2."""

    def error(self, message):
        raise UsageError(message)


def _common_options() -> argparse.ArgumentParser:
    # Defaults are None so unset flags fall through to the config file and model defaults
    common = argparse.ArgumentParser(add_help=False)

    files = common.add_argument_group("files")
    files.add_argument("--input", help="CSV input (rows = samples); '-' reads stdin")
    files.add_argument("--input2", help="second CSV input (gram, hsic, mmd)")
    files.add_argument("--test-kernel", dest="test_kernel",
                       help="test-by-train kernel CSV to center against --input (center)")
    files.add_argument("--model", help="saved embedding model (oos-embed)")
    files.add_argument("--save-model", dest="save_model", help="write the fitted model (embed)")
    files.add_argument("--vectors", help="also write eigenvectors to this CSV (eig)")
    files.add_argument("--output", help="result path; '-' (default) writes stdout")
    files.add_argument("--meta", help="metadata sidecar path (default <output>.meta.json)")
    files.add_argument("--format", choices=["csv", "json"])
    files.add_argument("--config", help="KEY=VALUE file with defaults for any option")

    kernel = common.add_argument_group("kernel")
    kernel.add_argument("--kernel", help="linear, rbf, laplacian, sigmoid, polynomial, cosine, chi_squared")
    kernel.add_argument("--gamma", help="positive scale or 'auto' (1/d)")
    kernel.add_argument("--intercept", type=float)
    kernel.add_argument("--degree", type=int)
    kernel.add_argument("--kernel-y", dest="kernel_y", help="kernel for --input2 (hsic)")
    kernel.add_argument("--gamma-y", dest="gamma_y")
    kernel.add_argument("--intercept-y", dest="intercept_y", type=float)
    kernel.add_argument("--degree-y", dest="degree_y", type=int)

    post = common.add_argument_group("gram post-processing")
    post.add_argument("--center", action="store_true", default=None)
    post.add_argument("--normalize", "--method", dest="normalize",
                      choices=["none", "cosine", "t-mean"])
    post.add_argument("--t", type=float, help="generalized-mean exponent for t-mean")
    post.add_argument("--distances", choices=["squared", "plain"])
    post.add_argument("--check-triangle", dest="check_triangle", action="store_true", default=None)

    spectral = common.add_argument_group("embedding and nystrom")
    spectral.add_argument("--p", type=int, help="embedding dimension")
    spectral.add_argument("--dimension", type=int, help="single 1-based component (oos-embed)")
    spectral.add_argument("--eigenfunction", action="store_true", default=None,
                          help="output eigenfunction values f_k instead of embeddings")
    spectral.add_argument("--m", type=int, help="landmark count")
    spectral.add_argument("--strategy", choices=["uniform", "greedy_pivot"])
    spectral.add_argument("--seed", type=int)
    spectral.add_argument("--pinv-threshold", dest="pinv_threshold", type=float)
    spectral.add_argument("--no-error", dest="compute_error", action="store_false", default=None,
                          help="skip the exact-kernel reconstruction error")

    numeric = common.add_argument_group("tolerances")
    numeric.add_argument("--tol", type=float, help="PSD/symmetry tolerance")
    numeric.add_argument("--eig-tol", dest="eig_tol", type=float)
    numeric.add_argument("--max-sweeps", dest="max_sweeps", type=int)
    numeric.add_argument("--jitter", type=float, help="diagonal ridge for Cholesky (validate)")

    common.add_argument("--verbose", action="store_true", default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="kernel-toolkit",
        description="Kernel methods over CSV datasets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_options()
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common])
    return parser


# =============================================================================
# Helpers
# =============================================================================

def _load_data(config: RunConfig, path: str, audit: RunAudit, label: str = "input") -> DataMatrix:
    X = load_data(path)
    audit.log_event(
        RunEventType.INPUT_LOADED,
        config.command,
        f"loaded {label} {path}: {X.n} samples × {X.d} features",
        {"path": path, "n": X.n, "d": X.d},
    )
    return X


def _load_square(config: RunConfig, path: str, audit: RunAudit) -> np.ndarray:
    values = load_square(path)
    audit.log_event(
        RunEventType.INPUT_LOADED,
        config.command,
        f"loaded {path}: {values.shape[0]}×{values.shape[1]} matrix",
        {"path": path, "n": values.shape[0]},
    )
    return values


def _load_gram(config: RunConfig, audit: RunAudit) -> GramMatrix:
    return GramMatrix.from_array(_load_square(config, config.input, audit), tol=config.tolerances()["symmetry"])


def _resolve_kernel(config: RunConfig, d: int, audit: RunAudit, second: bool = False):
    spec = (config.kernel_spec_y() if second else config.kernel_spec()).resolved(d)
    audit.log_event(
        RunEventType.PARAMETER_RESOLVED,
        config.command,
        f"kernel {spec.family.value} with gamma {spec.gamma!r} (d={d})",
        spec.to_dict(),
    )
    return spec


def _postprocess(config: RunConfig, K: GramMatrix, audit: RunAudit) -> GramMatrix:
    if config.normalize == "cosine":
        K = cosine_normalize(K)
    elif config.normalize == "t-mean":
        K = generalized_normalize(K, config.t)
    if config.center:
        K = double_center(K)
    if config.normalize != "none" or config.center:
        audit.log_event(
            RunEventType.OPERATION_COMPLETED,
            config.command,
            f"post-processing: normalize={config.normalize}, center={config.center}",
        )
    return K


# =============================================================================
# Commands
# =============================================================================

def _run_gram(config: RunConfig, audit: RunAudit) -> CommandResult:
    X = _load_data(config, config.input, audit)
    spec = _resolve_kernel(config, X.d, audit)
    if config.input2 is not None:
        if config.center or config.normalize != "none":
            raise ConfigError("--center and --normalize apply to a single-dataset Gram, not with --input2")
        X2 = _load_data(config, config.input2, audit, label="input2")
        Kt = gram_between(spec, X, X2)
        return CommandResult(Kt, {"kernel": spec.to_dict()})
    K = _postprocess(config, gram(spec, X), audit)
    return CommandResult(K.values, {"kernel": spec.to_dict(), "centered": K.centered})


def _run_center(config: RunConfig, audit: RunAudit) -> CommandResult:
    K = _load_gram(config, audit)
    if config.test_kernel is None:
        return CommandResult(double_center(K).values, {"centered": True})
    # test kernel rows are test samples: n_t × n
    test = load_table(config.test_kernel).values
    if test.shape[1] != K.n:
        raise DimensionMismatch(
            f"test kernel {config.test_kernel} has {test.shape[1]} columns, "
            f"training kernel has order {K.n}"
        )
    centered = center_out_of_sample(K, test.T).T
    return CommandResult(centered, {"test_kernel": config.test_kernel})


def _run_normalize(config: RunConfig, audit: RunAudit) -> CommandResult:
    K = _load_gram(config, audit)
    if config.normalize == "cosine":
        result = cosine_normalize(K)
    else:
        result = generalized_normalize(K, config.t)
    return CommandResult(result.values, {"method": config.normalize, "t": config.t})


def _run_validate(config: RunConfig, audit: RunAudit) -> CommandResult:
    values = _load_square(config, config.input, audit)
    report = validate_mercer(values, tol=config.tol, eig_tol=config.eig_tol, max_sweeps=config.max_sweeps)
    payload = report.to_dict()

    payload["cholesky"] = None
    payload["jitter"] = config.jitter
    if report.symmetric:
        try:
            cholesky(GramMatrix.from_array(values, tol=config.tol), jitter=config.jitter)
            payload["cholesky"] = "ok"
        except (NotPositiveDefinite, NotSymmetric) as e:
            payload["cholesky"] = f"failed: {e}"

    audit.log_event(
        RunEventType.VALIDATION_RESULT,
        config.command,
        f"symmetric={report.symmetric} psd={report.psd} min_eigenvalue={report.min_eigenvalue!r}",
        report.to_dict(),
    )
    if not report.psd:
        audit.notice(config.command, "matrix is not positive semi-definite under the tolerance")
    return CommandResult(payload)


def _run_from_distance(config: RunConfig, audit: RunAudit) -> CommandResult:
    values = _load_square(config, config.input, audit)
    if config.distances == "plain":
        values = DistanceMatrix(values).values ** 2
    D = DistanceMatrix(values)

    details = {"distances": config.distances}
    if config.check_triangle:
        violation = check_triangle_inequality(D, squared=True)
        details["triangle_violation"] = list(violation) if violation else None
        if violation:
            i, j, k = violation
            audit.notice(
                config.command,
                f"triangle inequality violated: d({i},{j}) > d({i},{k}) + d({k},{j})",
                triple=[i, j, k],
            )
    return CommandResult(kernel_from_distance(D).values, details)


def _run_embed(config: RunConfig, audit: RunAudit) -> CommandResult:
    X = _load_data(config, config.input, audit)
    spec = _resolve_kernel(config, X.d, audit)
    model = fit_from_data(
        spec,
        X,
        config.p,
        tol=config.eig_tol,
        max_sweeps=config.max_sweeps,
    )
    if model.truncated:
        audit.notice(
            config.command,
            f"embedding dimension truncated from {model.requested_p} to {model.p}: "
            f"only {model.p} eigenvalues exceed the floor",
            requested_p=model.requested_p,
            p=model.p,
        )
    details = {
        "kernel": spec.to_dict(),
        "p": model.p,
        "requested_p": model.requested_p,
        "eigenvalues": model.eigenvalues.tolist(),
    }
    if config.save_model:
        save_model(model, config.save_model)
        audit.log_event(RunEventType.MODEL_SAVED, config.command, f"model written to {config.save_model}")
        details["model"] = config.save_model
    return CommandResult(embed_training(model).T, details)


def _run_oos_embed(config: RunConfig, audit: RunAudit) -> CommandResult:
    model = load_model(config.model)
    audit.log_event(
        RunEventType.MODEL_LOADED,
        config.command,
        f"model {config.model}: n={model.n} p={model.p}",
        model.to_dict(),
    )
    X_t = _load_data(config, config.input, audit)

    if config.dimension is not None and config.dimension > model.p:
        raise IndexOutOfRange(config.dimension, model.p)
    components = [config.dimension] if config.dimension else list(range(1, model.p + 1))

    if config.eigenfunction:
        values = np.array([
            [eigenfunction_value(model, X_t.column(i), k) for k in components]
            for i in range(X_t.n)
        ]).reshape(X_t.n, len(components))
    else:
        Y = embed_out_of_sample_batch(model, X_t).T
        values = Y[:, [k - 1 for k in components]]
    return CommandResult(values, {
        "model": config.model,
        "components": components,
        "eigenfunction": bool(config.eigenfunction),
    })


def _run_nystrom(config: RunConfig, audit: RunAudit) -> CommandResult:
    X = _load_data(config, config.input, audit)
    spec = _resolve_kernel(config, X.d, audit)
    provider = DataKernelProvider(spec, X)
    landmarks = select_landmarks(provider, config.m, config.strategy, config.seed)
    model = build(provider, landmarks, pinv_threshold=config.pinv_threshold)
    K_tilde = complete(model)
    details = {
        "kernel": spec.to_dict(),
        "strategy": config.strategy,
        **model.to_dict(),
        "kernel_evaluations": provider.evaluations,
    }
    if config.compute_error:
        error = reconstruction_error(gram(spec, X), K_tilde)
        details["reconstruction_error"] = error
        audit.log_event(
            RunEventType.OPERATION_COMPLETED,
            config.command,
            f"relative Frobenius reconstruction error {error!r}",
        )
    return CommandResult(K_tilde.values, details)


def _run_hsic(config: RunConfig, audit: RunAudit) -> CommandResult:
    X = _load_data(config, config.input, audit)
    Y = _load_data(config, config.input2, audit, label="input2")
    spec_x = _resolve_kernel(config, X.d, audit)
    spec_y = _resolve_kernel(config, Y.d, audit, second=True)
    value = hsic_from_samples(spec_x, X, Y, spec_y)
    return CommandResult({"hsic": value, "n": X.n}, {"kernel": spec_x.to_dict(), "kernel_y": spec_y.to_dict()})


def _run_mmd(config: RunConfig, audit: RunAudit) -> CommandResult:
    X = _load_data(config, config.input, audit)
    Y = _load_data(config, config.input2, audit, label="input2")
    spec = _resolve_kernel(config, X.d, audit)
    result = mmd2_from_samples(spec, X, Y)
    if result.unequal_sizes:
        audit.notice(
            config.command,
            f"unequal sample sizes n={result.n}, m={result.m}; biased estimator with per-block means",
            n=result.n,
            m=result.m,
        )
    return CommandResult(result.to_dict(), {"kernel": spec.to_dict()})


def _run_eig(config: RunConfig, audit: RunAudit) -> CommandResult:
    values = _load_square(config, config.input, audit)
    system = eigh(values, tol=config.eig_tol, max_sweeps=config.max_sweeps)
    details = {"sweeps": system.sweeps, "off_norm": system.off_norm}
    if config.vectors:
        write_matrix(system.eigenvectors, config.vectors, config.format)
        audit.log_event(RunEventType.OUTPUT_WRITTEN, config.command, f"eigenvectors written to {config.vectors}")
        details["vectors"] = config.vectors
    return CommandResult(system.eigenvalues, details)


_HANDLERS: dict[str, Callable[[RunConfig, RunAudit], CommandResult]] = {
    "gram": _run_gram,
    "center": _run_center,
    "normalize": _run_normalize,
    "validate": _run_validate,
    "from-distance": _run_from_distance,
    "embed": _run_embed,
    "oos-embed": _run_oos_embed,
    "nystrom": _run_nystrom,
    "hsic": _run_hsic,
    "mmd": _run_mmd,
    "eig": _run_eig,
}


# =============================================================================
# Output
# =============================================================================

def _sidecar_path(config: RunConfig) -> Optional[str]:
    if config.meta:
        return config.meta
    if config.output != "-":
        return f"{config.output}.meta.json"
    return None


def _write_outputs(config: RunConfig, result: CommandResult, audit: RunAudit) -> None:
    if result.is_report:
        write_report(result.payload, config.output, config.format)
        shape = None
    else:
        write_matrix(result.payload, config.output, config.format)
        payload = result.payload.reshape(-1, 1) if result.payload.ndim == 1 else result.payload
        shape = list(payload.shape)
    audit.log_event(RunEventType.OUTPUT_WRITTEN, config.command, f"result written to {config.output}")

    sidecar = _sidecar_path(config)
    if sidecar is None:
        return
    metadata = {
        "command": config.command,
        "version": __version__,
        "inputs": {
            key: getattr(config, key)
            for key in ("input", "input2", "test_kernel", "model")
            if getattr(config, key) is not None
        },
        "orientation": ORIENTATION,
        "seed": config.seed,
        "tolerances": config.tolerances(),
        "notices": audit.notices(),
        "output": {"path": config.output, "format": config.format, "shape": shape},
        "result": result.details,
        "audit": audit.summary(),
    }
    write_json(metadata, sidecar)


# =============================================================================
# Entry point
# =============================================================================

def _error_event(error: KernelToolkitError) -> RunEventType:
    if isinstance(error, NumericalError):
        return RunEventType.NUMERICAL_FAILURE
    if isinstance(error, DataError):
        return RunEventType.DATA_ERROR
    return RunEventType.USAGE_ERROR


def run(argv: Optional[list[str]] = None) -> int:
    """
    Execute one CLI invocation.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        int: Exit code (0 success, 1 usage, 2 data, 3 numerical)
    """
    audit = RunAudit()
    command = "cli"
    try:
        args = build_parser().parse_args(argv)
        flags = vars(args)
        config_path = flags.pop("config", None)
        command = flags.get("command") or command
        config = build_run_config(flags, config_path)
        if config.verbose:
            logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
        result = _HANDLERS[config.command](config, audit)
        _write_outputs(config, result, audit)
        return 0
    except KernelToolkitError as e:
        audit.log_event(_error_event(e), command, str(e), e.to_dict())
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0
