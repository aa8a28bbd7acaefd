"""Plain-text artifact formats.

Matrices use the MXT format: a ``rows cols`` header line followed by one line
per row of space-separated values printed with 17 significant digits, which
round-trips binary64 values exactly.  Tables are CSV with a header row.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, MissingArtifactError

FLOAT_FORMAT = "%.17g"


def _require_file(path: Path) -> None:
    if not path.is_file():
        raise MissingArtifactError(f"missing artifact: {path}")


def write_mxt(path, A: np.ndarray) -> None:
    """Write a matrix (vectors are stored as one column)."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise InvalidArgumentError("MXT stores one- or two-dimensional arrays")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        fh.write(f"{A.shape[0]} {A.shape[1]}\n")
        if A.size:
            np.savetxt(fh, A, fmt=FLOAT_FORMAT, delimiter=" ")


def read_mxt(path) -> np.ndarray:
    """Read a matrix written by :func:`write_mxt`."""
    path = Path(path)
    _require_file(path)
    with path.open() as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise InvalidArgumentError(f"{path}: malformed MXT header")
        rows, cols = int(header[0]), int(header[1])
        data = np.loadtxt(fh, dtype=float, ndmin=2) if rows * cols else np.empty((rows, cols))
    if rows * cols == 0:
        return np.empty((rows, cols))
    if data.shape != (rows, cols):
        raise InvalidArgumentError(f"{path}: expected {rows}x{cols} values, found {data.shape}")
    return data


def mxt_shape(path) -> tuple[int, int]:
    """Dimensions recorded in an MXT header."""
    path = Path(path)
    _require_file(path)
    with path.open() as fh:
        rows, cols = fh.readline().split()
    return int(rows), int(cols)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def write_csv(path, header, rows) -> None:
    """Write a CSV table; floats are printed with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def read_csv(path) -> list[dict]:
    """Read a CSV table as a list of string-valued rows."""
    path = Path(path)
    _require_file(path)
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    path = Path(path)
    _require_file(path)
    return json.loads(path.read_text())
