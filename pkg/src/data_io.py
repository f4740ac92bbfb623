"""
Data I/O - CSV Ingestion and Result Writing

Reads numeric CSV tables (rows = samples, columns = features, optional header
row) with pandas and writes matrices and reports as CSV or JSON.

Parse failures are reported as DataFormatError naming the file and the
1-based row and column of the first bad cell. Rows count from the top of the
file, a header row included; blank lines are skipped by the parser.
"""

import json
import re
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from .errors import DataFormatError
from .state import DataMatrix

# CSV float format: 17 significant digits round-trip every float64
FLOAT_FORMAT = "%.17g"

_PARSER_LINE = re.compile(r"line (\d+)")


@dataclass(frozen=True)
class LoadedTable:
    """A parsed CSV table."""
    path: str
    values: np.ndarray                  # rows × columns, float64
    header: Optional[list[str]] = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def to_data_matrix(self) -> DataMatrix:
        """Transpose rows=samples into the column-sample DataMatrix."""
        return DataMatrix.from_samples(self.values)


# =============================================================================
# Reading
# =============================================================================

def _parse_float(cell: str) -> float:
    """Correctly rounded float of a cell, or NaN when it is not a number."""
    if "_" in cell:
        return np.nan
    try:
        return float(cell)
    except ValueError:
        return np.nan


def _is_number(cell: str) -> bool:
    if "_" in cell:
        return False
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _read_frame(path: str) -> pd.DataFrame:
    source = sys.stdin if path == "-" else path
    try:
        return pd.read_csv(
            source,
            header=None,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except FileNotFoundError:
        raise DataFormatError("file not found", path) from None
    except IsADirectoryError:
        raise DataFormatError("path is a directory, not a file", path) from None
    except pd.errors.EmptyDataError:
        raise DataFormatError("file is empty", path) from None
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        row = int(match.group(1)) if match else None
        raise DataFormatError(f"malformed CSV ({e})", path, row=row) from None
    except UnicodeDecodeError:
        raise DataFormatError("file is not valid UTF-8 text", path) from None
    except OSError as e:
        raise DataFormatError(f"cannot read file ({e.strerror or e})", path) from None


def load_table(path: str) -> LoadedTable:
    """
    Parse a numeric CSV table.

    The first row is taken as a header when none of its cells is numeric.

    Args:
        path: File path, or "-" for standard input

    Returns:
        LoadedTable: Parsed values (and header names, if any)

    Raises:
        DataFormatError: Missing/empty file, ragged rows, or a cell that is
            not a finite number (with row and column)
    """
    frame = _read_frame(path)
    cells = frame.fillna("").astype(str).apply(lambda column: column.str.strip())

    header = None
    first_data_row = 0
    first_row = cells.iloc[0].tolist()
    if not any(_is_number(cell) for cell in first_row):
        header = first_row
        cells = cells.iloc[1:]
        first_data_row = 1
    if cells.empty:
        raise DataFormatError("no data rows", path)

    numeric = cells.map(_parse_float).to_numpy(dtype=np.float64)
    bad = np.argwhere(~np.isfinite(numeric))
    if bad.size:
        r, c = (int(v) for v in bad[0])
        raw = cells.iat[r, c]
        problem = "empty cell" if raw == "" else f"cannot parse {raw!r} as a finite number"
        raise DataFormatError(problem, path, row=first_data_row + r + 1, column=c + 1)

    return LoadedTable(path=path, values=numeric, header=header)


def load_data(path: str) -> DataMatrix:
    """Load a rows=samples CSV as a d×n DataMatrix."""
    return load_table(path).to_data_matrix()


def load_square(path: str) -> np.ndarray:
    """Load a CSV holding a square matrix (kernel or distances)."""
    table = load_table(path)
    rows, columns = table.shape
    if rows != columns:
        raise DataFormatError(f"expected a square matrix, got {rows}×{columns}", path)
    return table.values


# =============================================================================
# Writing
# =============================================================================

@contextmanager
def _open_output(output: str):
    if output == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        try:
            with open(output, "w", encoding="utf-8", newline="") as handle:
                yield handle
        except OSError as e:
            raise DataFormatError(f"cannot write output ({e.strerror or e})", output) from None


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def to_json(payload) -> str:
    """Serialize with Python's shortest round-trip float repr."""
    return json.dumps(_jsonable(payload), indent=2) + "\n"


def write_matrix(values, output: str = "-", fmt: str = "csv") -> None:
    """
    Write a matrix (or vector, as a single column) as CSV or JSON.

    Args:
        values: 2-D array, or 1-D array written as one value per row
        output: Path, or "-" for standard output
        fmt: "csv" or "json"
    """
    values = np.asarray(values)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    with _open_output(output) as handle:
        if fmt == "json":
            handle.write(to_json(values))
        else:
            pd.DataFrame(values).to_csv(
                handle,
                header=False,
                index=False,
                float_format=FLOAT_FORMAT,
                lineterminator="\n",
            )


def write_report(report: dict, output: str = "-", fmt: str = "csv") -> None:
    """Write a flat key/value report as CSV rows or a JSON object."""
    with _open_output(output) as handle:
        if fmt == "json":
            handle.write(to_json(report))
        else:
            rows = [(key, _jsonable(value)) for key, value in report.items()]
            pd.DataFrame(rows, columns=["key", "value"]).to_csv(
                handle,
                index=False,
                float_format=FLOAT_FORMAT,
                lineterminator="\n",
            )


def write_json(payload: dict, path: str) -> None:
    """Write a JSON document (metadata sidecar, model header)."""
    with _open_output(path) as handle:
        handle.write(to_json(payload))
