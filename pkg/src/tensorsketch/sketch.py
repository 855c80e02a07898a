"""Count Sketch and AMS sketch of a single vector.

A Count Sketch folds a d-dimensional vector into D buckets through a bucket
hash h and a sign hash s: bucket k holds sum_{i: h(i)=k} s(i) * x_i.  Inner
products of two sketches built from the *same* (h, s) pair are unbiased
estimates of the inner product of the originals, so sketches carry the
identity of their hashes and refuse to combine across different randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, IncompatibleSketchError, ParameterError
from .fft import _is_pow2
from .hashing import KWiseHash, SignHash


class InputVector:
    """A d-dimensional real vector, stored as sorted (index, value) pairs.

    Zero entries are dropped at construction, so the same mathematical
    vector yields the same object whether it arrived dense or sparse.
    """

    __slots__ = ("dim", "indices", "values")

    def __init__(self, dim: int, indices, values):
        if dim < 1:
            raise ParameterError(f"vector dimension must be >= 1, got {dim}")
        idx = np.asarray(indices, dtype=np.int64)
        val = np.asarray(values, dtype=np.float64)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise ParameterError("indices and values must be 1-D and equal length")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= dim or np.any(np.diff(idx) <= 0):
                raise ParameterError(
                    "indices must be strictly increasing and inside [0, dim)"
                )
        if not np.isfinite(val).all():
            raise ParameterError("vector values must be finite")
        keep = val != 0.0
        if not keep.all():
            idx, val = idx[keep], val[keep]
        self.dim = int(dim)
        self.indices = idx
        self.values = val

    @classmethod
    def from_dense(cls, values) -> "InputVector":
        dense = np.asarray(values, dtype=np.float64)
        if dense.ndim != 1 or dense.size < 1:
            raise ParameterError("dense input must be a non-empty 1-D sequence")
        nz = np.flatnonzero(dense)
        return cls(dense.size, nz, dense[nz])

    @classmethod
    def from_pairs(cls, dim: int, pairs) -> "InputVector":
        if len(pairs) == 0:
            return cls(dim, [], [])
        idx, val = zip(*pairs)
        return cls(dim, idx, val)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        dense[self.indices] = self.values
        return dense

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def dot(self, other: "InputVector") -> float:
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        _, ia, ib = np.intersect1d(
            self.indices, other.indices, assume_unique=True, return_indices=True
        )
        return float(np.dot(self.values[ia], other.values[ib]))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def norm1(self) -> float:
        return float(np.abs(self.values).sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InputVector)
            and self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return f"InputVector(dim={self.dim}, nnz={self.nnz})"


@dataclass(frozen=True)
class CountSketchVector:
    """A D-bucket Count Sketch plus the identity of the (h, s) pair behind it."""

    values: np.ndarray
    origin_dim: int
    hash_ids: tuple

    def __len__(self) -> int:
        return self.values.shape[0]


def count_sketch_values(x: InputVector, h: KWiseHash, s: SignHash) -> np.ndarray:
    """The raw bucket array of the Count Sketch (no identity wrapper)."""
    out = np.zeros(h.output_range)
    if x.nnz:
        buckets = h.evaluate_many(x.indices)
        np.add.at(out, buckets, s.signs_many(x.indices) * x.values)
    return out


def count_sketch(x: InputVector, h: KWiseHash, s: SignHash) -> CountSketchVector:
    """Sketch x into D = h.output_range buckets; O(nnz) given the hashes.

    D must be a power of two so the sketch can enter FFT convolutions.
    """
    if not _is_pow2(h.output_range):
        raise DimensionError(
            f"sketch width must be a power of two, got {h.output_range}"
        )
    return CountSketchVector(
        values=count_sketch_values(x, h, s),
        origin_dim=x.dim,
        hash_ids=(h.key(), s.key()),
    )


def ams_sketch(x: InputVector, s: SignHash) -> float:
    """The signed sum sum_i s(i) * x_i; its square estimates ||x||^2."""
    if x.nnz == 0:
        return 0.0
    return float(np.dot(s.signs_many(x.indices), x.values))


def count_sketch_inner(cx: CountSketchVector, cy: CountSketchVector) -> float:
    """Inner product of two sketches; unbiased for <x, y> over hash draws.

    Both sketches must have been built from the same (h, s) pair -- an inner
    product across different randomness estimates nothing, so it is refused.
    """
    if cx.hash_ids != cy.hash_ids:
        raise IncompatibleSketchError(
            "sketches were built from different hash pairs; their inner "
            "product does not estimate an inner product of inputs"
        )
    if len(cx) != len(cy):
        raise DimensionError(f"sketch width mismatch: {len(cx)} vs {len(cy)}")
    return float(np.dot(cx.values, cy.values))
