"""
Kernel Toolkit Configuration Module

Holds the numerical tolerance defaults and the validated run configuration for
the command-line front end. Settings come from three layers, later ones winning:

1. Defaults declared on the models below
2. A KEY=VALUE config file passed with --config (read with python-dotenv)
3. Flags given explicitly on the command line

Environment variables are never consulted.
"""

from pathlib import Path
from typing import Literal, Optional

from dotenv import dotenv_values
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    model_validator,
)

from .errors import ConfigError
from .state import Gamma, KernelFamily, KernelSpec


class Tolerances(BaseModel):
    """Numerical tolerance defaults shared by every module."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    psd: PositiveFloat = 1e-8              # relative: min eig >= -psd * max(1, max eig)
    symmetry: PositiveFloat = 1e-10        # relative to max|S|
    eigh: PositiveFloat = 1e-10            # off-diagonal norm relative to ||S||_F
    max_sweeps: PositiveInt = 50
    pinv_threshold: PositiveFloat = 1e-10  # relative to max eigenvalue of A
    eig_floor: PositiveFloat = 1e-10       # relative to the leading eigenvalue
    distance: PositiveFloat = 1e-10        # relative to max|D|


DEFAULT_TOLERANCES = Tolerances()


COMMANDS = (
    "gram",
    "center",
    "normalize",
    "validate",
    "from-distance",
    "embed",
    "oos-embed",
    "nystrom",
    "hsic",
    "mmd",
    "eig",
)

Command = Literal[
    "gram",
    "center",
    "normalize",
    "validate",
    "from-distance",
    "embed",
    "oos-embed",
    "nystrom",
    "hsic",
    "mmd",
    "eig",
]


class RunConfig(BaseModel):
    """
    Validated configuration of a single CLI invocation.

    Unknown fields are rejected so a typo in a config file fails loudly.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command

    # Files
    input: Optional[str] = None
    input2: Optional[str] = None
    test_kernel: Optional[str] = None
    model: Optional[str] = None
    save_model: Optional[str] = None
    vectors: Optional[str] = None
    output: str = "-"
    meta: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    # Kernel for the (first) dataset
    kernel: KernelFamily = KernelFamily.RBF
    gamma: Gamma = "auto"
    intercept: float = Field(default=1.0, allow_inf_nan=False)
    degree: PositiveInt = 3

    # Optional separate kernel for the second dataset (hsic)
    kernel_y: Optional[KernelFamily] = None
    gamma_y: Optional[Gamma] = None
    intercept_y: Optional[float] = None
    degree_y: Optional[PositiveInt] = None

    # Gram post-processing
    center: bool = False
    normalize: Literal["none", "cosine", "t-mean"] = "none"
    t: Optional[float] = Field(default=None, allow_inf_nan=False)

    # Distances
    distances: Literal["squared", "plain"] = "squared"
    check_triangle: bool = False

    # Embedding
    p: Optional[PositiveInt] = None
    dimension: Optional[PositiveInt] = None
    eigenfunction: bool = False

    # Nystrom
    m: Optional[PositiveInt] = None
    strategy: Literal["uniform", "greedy_pivot"] = "uniform"
    seed: int = 0
    pinv_threshold: PositiveFloat = DEFAULT_TOLERANCES.pinv_threshold
    compute_error: bool = True

    # Tolerance overrides
    tol: PositiveFloat = DEFAULT_TOLERANCES.psd
    eig_tol: PositiveFloat = DEFAULT_TOLERANCES.eigh
    max_sweeps: PositiveInt = DEFAULT_TOLERANCES.max_sweeps
    jitter: NonNegativeFloat = 0.0

    verbose: bool = False

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.command != "oos-embed" and self.input is None:
            raise ValueError(f"'{self.command}' requires --input")
        if self.command == "oos-embed":
            if self.model is None:
                raise ValueError("'oos-embed' requires --model")
            if self.input is None:
                raise ValueError("'oos-embed' requires --input with query points")
        if self.command in ("hsic", "mmd") and self.input2 is None:
            raise ValueError(f"'{self.command}' requires --input2")
        if self.command == "embed" and self.p is None:
            raise ValueError("'embed' requires --p (embedding dimension >= 1)")
        if self.command == "nystrom" and self.m is None:
            raise ValueError("'nystrom' requires --m (landmark count >= 1)")
        if self.normalize == "t-mean" and self.t is None:
            raise ValueError("normalization 't-mean' requires --t")
        if self.command == "normalize" and self.normalize == "none":
            raise ValueError("'normalize' requires --method cosine or t-mean")
        return self

    def kernel_spec(self) -> KernelSpec:
        """KernelSpec for the first dataset."""
        return KernelSpec(
            family=self.kernel,
            gamma=self.gamma,
            intercept=self.intercept,
            degree=self.degree,
            t=self.t or 0.0,
        )

    def kernel_spec_y(self) -> KernelSpec:
        """KernelSpec for the second dataset; unset fields fall back to the first."""
        return KernelSpec(
            family=self.kernel_y or self.kernel,
            gamma=self.gamma_y if self.gamma_y is not None else self.gamma,
            intercept=self.intercept_y if self.intercept_y is not None else self.intercept,
            degree=self.degree_y or self.degree,
        )

    def tolerances(self) -> dict:
        return {
            "psd": self.tol,
            "eigh": self.eig_tol,
            "max_sweeps": self.max_sweeps,
            "pinv_threshold": self.pinv_threshold,
            "eig_floor": DEFAULT_TOLERANCES.eig_floor,
            "distance": DEFAULT_TOLERANCES.distance,
            "symmetry": DEFAULT_TOLERANCES.symmetry,
        }


def load_config_file(path: str) -> dict:
    """
    Read a KEY=VALUE config file.

    Keys are case-insensitive and may use dashes; empty values are ignored.

    Args:
        path: Path of the config file

    Returns:
        dict: Field name -> raw string value

    Raises:
        ConfigError: If the file does not exist or cannot be read
    """
    if not Path(path).is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        values = dotenv_values(path)
    except OSError as e:
        raise ConfigError(f"config file {path} is unreadable ({e.strerror or e})") from None
    return {
        key.strip().lower().replace("-", "_"): value
        for key, value in values.items()
        if value not in (None, "")
    }


def build_run_config(flags: dict, config_path: Optional[str] = None) -> RunConfig:
    """
    Merge config-file values and explicit flags into a RunConfig.

    Args:
        flags: Parsed command-line values; None means "not given"
        config_path: Optional config file path

    Returns:
        RunConfig: Validated configuration

    Raises:
        ConfigError: If any parameter is invalid, naming the parameter
    """
    merged = load_config_file(config_path) if config_path else {}
    merged.update({key: value for key, value in flags.items() if value is not None})
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as e:
        problems = []
        for err in e.errors():
            where = ".".join(str(part) for part in err["loc"]) or "config"
            problems.append(f"{where}: {err['msg']}")
        raise ConfigError("invalid configuration: " + "; ".join(problems)) from None
