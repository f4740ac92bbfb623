"""
Model Persistence

Saves and loads fitted EmbeddingModels as a numpy .npz container:
- `header`: JSON string with the format tag, version, sizes and kernel spec
- float64 arrays: gram, eigenvalues, eigenvectors, row_means, grand_mean,
  and training (when the model supports out-of-sample queries)

Loading never unpickles; every array is read back bit-for-bit, so a reloaded
model reproduces the in-memory model's outputs exactly.
"""

import json
import logging
import zipfile

import numpy as np
from pydantic import ValidationError

from .errors import CorruptModel, DataError, DataFormatError, VersionMismatch
from .kernels.embedding import EmbeddingModel
from .state import DataMatrix, GramMatrix, KernelSpec

logger = logging.getLogger(__name__)

MODEL_FORMAT = "kernel-embedding"
MODEL_VERSION = 1

_REQUIRED_ARRAYS = ("gram", "eigenvalues", "eigenvectors", "row_means", "grand_mean")


def model_header(model: EmbeddingModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "n": model.n,
        "p": model.p,
        "d": model.d,
        "requested_p": model.requested_p,
        "eig_floor": model.eig_floor,
        "spec": model.spec.to_dict() if model.spec is not None else None,
        "has_training": model.training is not None,
    }


def save_model(model: EmbeddingModel, path: str) -> dict:
    """
    Write a model container to path (no suffix is appended).

    Returns:
        dict: The header that was written

    Raises:
        DataFormatError: If the path cannot be written
    """
    header = model_header(model)
    arrays = {
        "gram": model.gram.values,
        "eigenvalues": model.eigenvalues,
        "eigenvectors": model.eigenvectors,
        "row_means": model.row_means,
        "grand_mean": np.array(model.grand_mean, dtype=np.float64),
    }
    if model.training is not None:
        arrays["training"] = model.training.values
    try:
        with open(path, "wb") as handle:
            np.savez(handle, header=np.array(json.dumps(header, sort_keys=True)), **arrays)
    except OSError as e:
        raise DataFormatError(f"cannot write model ({e.strerror or e})", path) from None
    logger.info("saved embedding model n=%d p=%d to %s", model.n, model.p, path)
    return header


def _read_archive(path: str) -> tuple[dict, dict]:
    try:
        with np.load(path, allow_pickle=False) as archive:
            arrays = {name: archive[name] for name in archive.files}
    except FileNotFoundError:
        raise CorruptModel(f"model file {path} does not exist") from None
    except (OSError, ValueError, EOFError, zipfile.BadZipFile) as e:
        raise CorruptModel(f"model file {path} is unreadable: {e}") from None

    if "header" not in arrays:
        raise CorruptModel(f"model file {path} has no header")
    try:
        header = json.loads(arrays.pop("header").item())
    except (ValueError, AttributeError) as e:
        raise CorruptModel(f"model file {path} has an unreadable header: {e}") from None
    if not isinstance(header, dict):
        raise CorruptModel(f"model file {path} header is not an object")
    return header, arrays


def load_model(path: str) -> EmbeddingModel:
    """
    Read a model container written by save_model.

    Raises:
        CorruptModel: Unreadable, truncated or internally inconsistent file
        VersionMismatch: Unknown format tag or version
    """
    header, arrays = _read_archive(path)

    if header.get("format") != MODEL_FORMAT:
        raise VersionMismatch(
            f"model file {path} has format {header.get('format')!r}, expected {MODEL_FORMAT!r}"
        )
    if header.get("version") != MODEL_VERSION:
        raise VersionMismatch(
            f"model file {path} has version {header.get('version')!r}, "
            f"this build reads version {MODEL_VERSION}"
        )
    missing = [name for name in _REQUIRED_ARRAYS if name not in arrays]
    if header.get("has_training"):
        missing += [] if "training" in arrays else ["training"]
    if missing:
        raise CorruptModel(f"model file {path} is missing arrays: {', '.join(missing)}")

    try:
        gram = GramMatrix(arrays["gram"])
        spec = KernelSpec.model_validate(header["spec"]) if header.get("spec") else None
        training = DataMatrix(arrays["training"]) if header.get("has_training") else None
        model = EmbeddingModel(
            gram=gram,
            eigenvalues=arrays["eigenvalues"],
            eigenvectors=arrays["eigenvectors"],
            row_means=arrays["row_means"],
            grand_mean=float(arrays["grand_mean"]),
            spec=spec,
            training=training,
            requested_p=int(header.get("requested_p", 0)),
            eig_floor=float(header.get("eig_floor", 1e-10)),
        )
    except (DataError, ValidationError, KeyError, TypeError, ValueError) as e:
        raise CorruptModel(f"model file {path} is inconsistent: {e}") from None

    n, p = model.n, model.eigenvalues.shape[0]
    consistent = (
        model.eigenvalues.ndim == 1
        and model.eigenvectors.shape == (n, p)
        and model.row_means.shape == (n,)
        and header.get("n") == n
        and header.get("p") == p
        and (training is None or training.n == n)
    )
    if not consistent:
        raise CorruptModel(f"model file {path} has inconsistent array shapes")

    logger.info("loaded embedding model n=%d p=%d from %s", n, p, path)
    return model
