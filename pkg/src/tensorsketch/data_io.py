"""Dataset ingestion and matrix emission.

Input formats: libsvm-style sparse text (``<label> <index>:<value> ...``
with 1-based, strictly increasing indices) and dense CSV with an optional
label column.  File indices are 1-based; everything internal is 0-based,
and the conversion happens only here.  Values are printed with 17
significant digits, enough to round-trip float64 exactly.  The optional
binary matrix format is fixed little-endian regardless of host: a u32
magic ``0x54534B31`` ("TSK1"), u64 row count, u64 column count, then
float64 entries row-major.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ParseError
from .sketch import InputVector

MATRIX_MAGIC = 0x54534B31


@dataclass
class Dataset:
    """A list of same-dimension vectors with optional aligned labels."""

    vectors: list[InputVector]
    labels: list[float] | None
    dim: int = field(default=0)

    def __post_init__(self):
        for v in self.vectors:
            if v.dim != self.dim:
                raise ParameterError(
                    f"vector of dim {v.dim} in a dataset of dim {self.dim}"
                )
        if self.labels is not None and len(self.labels) != len(self.vectors):
            raise ParameterError("labels must align 1:1 with vectors")

    def __len__(self) -> int:
        return len(self.vectors)


def _payload(raw_line: str) -> str:
    return raw_line.split("#", 1)[0].strip()


def parse_libsvm(lines, force_dim: int | None = None) -> Dataset:
    """Parse sparse ``<label> <index>:<value>`` records into a Dataset.

    ``#`` starts a comment, blank lines are skipped.  The dataset dimension
    is the largest index seen unless ``force_dim`` asks for more; forcing
    fewer dimensions than the data uses is an error.  Every malformed line
    raises :class:`ParseError` carrying its 1-based line number.
    """
    records: list[tuple[float, list[tuple[int, float]]]] = []
    max_index = -1
    for lineno, raw in enumerate(lines, 1):
        line = _payload(raw)
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise ParseError(f"bad label {tokens[0]!r}", lineno) from None
        if not math.isfinite(label):
            raise ParseError(f"non-finite label {tokens[0]!r}", lineno)
        pairs: list[tuple[int, float]] = []
        previous = 0
        for token in tokens[1:]:
            index_text, sep, value_text = token.partition(":")
            if not sep:
                raise ParseError(f"malformed token {token!r}", lineno)
            try:
                index = int(index_text)
            except ValueError:
                raise ParseError(f"bad index in token {token!r}", lineno) from None
            if index <= 0:
                raise ParseError(f"index {index} is not 1-based positive", lineno)
            if index <= previous:
                raise ParseError("indices not increasing", lineno)
            try:
                value = float(value_text)
            except ValueError:
                raise ParseError(f"bad value in token {token!r}", lineno) from None
            if not math.isfinite(value):
                raise ParseError(f"non-finite value in token {token!r}", lineno)
            pairs.append((index - 1, value))
            previous = index
        records.append((label, pairs))
        max_index = max(max_index, previous - 1)

    if not records:
        return Dataset([], None, force_dim or 0)
    dim = max_index + 1
    if force_dim is not None:
        if force_dim < dim:
            raise ParameterError(
                f"forced dim {force_dim} is below the largest index {dim}"
            )
        dim = force_dim
    dim = max(dim, 1)
    vectors = [InputVector.from_pairs(dim, pairs) for _, pairs in records]
    return Dataset(vectors, [label for label, _ in records], dim)


def parse_csv_dense(lines, labels_in_first_column: bool = False) -> Dataset:
    """Parse dense comma-separated rows; all rows must share one width."""
    rows: list[list[float]] = []
    labels: list[float] = []
    width: int | None = None
    for lineno, raw in enumerate(lines, 1):
        line = _payload(raw)
        if not line:
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(
                f"ragged row: {len(cells)} cells where {width} expected", lineno
            )
        try:
            values = [float(cell) for cell in cells]
        except ValueError:
            raise ParseError("bad numeric cell", lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise ParseError("non-finite cell", lineno)
        if labels_in_first_column:
            if len(values) < 2:
                raise ParseError("label column leaves no features", lineno)
            labels.append(values[0])
            values = values[1:]
        rows.append(values)

    if not rows:
        return Dataset([], None, 0)
    vectors = [InputVector.from_dense(row) for row in rows]
    return Dataset(vectors, labels if labels_in_first_column else None, len(rows[0]))


def write_libsvm(dataset: Dataset, fh) -> None:
    """Emit sparse records (1-based indices); a missing label prints as 0."""
    labels = dataset.labels or [0.0] * len(dataset)
    for label, vector in zip(labels, dataset.vectors):
        parts = [f"{label:.17g}"]
        parts.extend(
            f"{i + 1}:{v:.17g}" for i, v in zip(vector.indices, vector.values)
        )
        fh.write(" ".join(parts) + "\n")


def write_csv_dense(dataset: Dataset, fh, include_labels: bool | None = None) -> None:
    """Emit dense rows; labels go into the first column when present."""
    if include_labels is None:
        include_labels = dataset.labels is not None
    if include_labels and dataset.labels is None:
        raise ParameterError("dataset has no labels to write")
    for row_index, vector in enumerate(dataset.vectors):
        cells = []
        if include_labels:
            cells.append(f"{dataset.labels[row_index]:.17g}")
        cells.extend(f"{v:.17g}" for v in vector.to_dense())
        fh.write(",".join(cells) + "\n")


def write_matrix_csv(matrix: np.ndarray, fh) -> None:
    for row in np.atleast_2d(matrix):
        fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_matrix_binary(matrix: np.ndarray, fh) -> None:
    m = np.ascontiguousarray(np.atleast_2d(matrix), dtype="<f8")
    fh.write(struct.pack("<IQQ", MATRIX_MAGIC, m.shape[0], m.shape[1]))
    fh.write(m.tobytes())


def read_matrix_binary(fh) -> np.ndarray:
    header = fh.read(20)
    if len(header) != 20:
        raise ParseError("truncated binary header", 1)
    magic, n, d = struct.unpack("<IQQ", header)
    if magic != MATRIX_MAGIC:
        raise ParseError(f"bad magic 0x{magic:08X}", 1)
    payload = fh.read(8 * n * d)
    if len(payload) != 8 * n * d:
        raise ParseError("truncated binary payload", 1)
    return np.frombuffer(payload, dtype="<f8").reshape(n, d).astype(np.float64)
