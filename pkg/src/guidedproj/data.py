"""Data container plus CSV reading and atomic file writing."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidDataError


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x p`` matrix of observations with optional labels.

    Attributes:
        values: Float array of shape ``(n, p)``; rows are observations.
        labels: Optional length-``n`` array of categorical labels (strings).
        column_names: Optional list of ``p`` column names.
    """

    values: np.ndarray
    labels: np.ndarray | None = None
    column_names: list[str] | None = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InvalidDataError(f"values must be 2-D, got shape {values.shape}")
        n, p = values.shape
        if n < 2 or p < 1:
            raise InvalidDataError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise InvalidDataError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = np.asarray(self.labels).astype(str)
            if labels.shape != (n,):
                raise InvalidDataError(f"expected {n} labels, got shape {labels.shape}")
            object.__setattr__(self, "labels", labels)
        if self.column_names is not None and len(self.column_names) != p:
            raise InvalidDataError(
                f"expected {p} column names, got {len(self.column_names)}"
            )

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def as_matrix(X) -> np.ndarray:
    """Return the float values of a DataMatrix or array-like, validated."""
    if isinstance(X, DataMatrix):
        return X.values
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2:
        raise InvalidDataError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise InvalidDataError(f"non-finite value at row {bad[0]}, column {bad[1]}")
    return arr


def read_csv(path, label_column: str | None = "label") -> DataMatrix:
    """Read a comma-separated file with a header row into a DataMatrix.

    Every column other than ``label_column`` must parse as a finite float.
    ``label_column`` is optional; when it is missing from the header the
    returned matrix has no labels.

    Raises:
        FileNotFoundError: The file does not exist.
        InvalidDataError: Header missing, ragged rows, or bad numeric cells.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidDataError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        label_idx = header.index(label_column) if label_column in header else None
        feature_idx = [j for j in range(len(header)) if j != label_idx]
        if not feature_idx:
            raise InvalidDataError(f"{path}: no numeric columns")
        rows, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InvalidDataError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            vals = []
            for j in feature_idx:
                cell = row[j].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise InvalidDataError(
                        f"{path}:{lineno}: column {header[j]!r}: cannot parse {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise InvalidDataError(
                        f"{path}:{lineno}: column {header[j]!r}: non-finite value {cell!r}"
                    )
                vals.append(v)
            rows.append(vals)
            if label_idx is not None:
                labels.append(row[label_idx].strip())
    if len(rows) < 2:
        raise InvalidDataError(f"{path}: need at least 2 data rows, got {len(rows)}")
    return DataMatrix(
        np.array(rows, dtype=float),
        labels=np.array(labels) if label_idx is not None else None,
        column_names=[header[j] for j in feature_idx],
    )


def format_float(v: float) -> str:
    return repr(float(v))


def csv_text(
    values: np.ndarray,
    column_names: Sequence[str],
    labels: Sequence[str] | None = None,
    label_column: str = "label",
) -> str:
    """Render a matrix (and optional trailing label column) as CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(column_names)
    if labels is not None:
        header.append(label_column)
    writer.writerow(header)
    for i, row in enumerate(np.asarray(values, dtype=float)):
        out = [format_float(v) for v in row]
        if labels is not None:
            out.append(str(labels[i]))
        writer.writerow(out)
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
