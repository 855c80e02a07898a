"""Tensor Sketch: a random feature map for polynomial kernels.

The map sketches the degree-p tensor power of a vector without materializing
it: p independent Count Sketches are transformed, multiplied component-wise
in the frequency domain, and transformed back.  The result is itself a Count
Sketch of x^(p) under the composed hashes

    H(i_1..i_p) = (h_1(i_1) + ... + h_p(i_p)) mod D
    S(i_1..i_p) = s_1(i_1) * ... * s_p(i_p)

so inner products of two mapped vectors are unbiased estimates of
<x, y>^p, with variance at most (3^p - 1)/D * ||x||^2p * ||y||^2p.  An
inhomogeneous kernel (c + <x, y>)^p is handled by appending sqrt(c) as an
extra coordinate before sketching.

Cost per vector is O(nnz(x) + p * D log D).  A numerical caveat: the product
of p spectra grows like ||x||_1^p, so inputs with ||x||_1 beyond about
10^(15/p) lose double precision; this is documented, not guarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError, ParameterError
from .fft import _is_pow2, fft_many, ifft_many
from .hashing import KWiseHash, SignHash, sample_kwise, sample_sign
from .sketch import InputVector, count_sketch_values

#: Ceiling on materialized tensor-power size in the brute-force oracle.
ORACLE_MAX_CELLS = 10**6


@dataclass(frozen=True)
class SketchConfig:
    """All parameters of a feature map: (d, D, p, c, seed)."""

    input_dim: int
    feature_dim: int
    degree: int
    offset: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.input_dim < 1:
            raise ParameterError(f"input_dim must be >= 1, got {self.input_dim}")
        if self.degree < 1:
            raise ParameterError(f"degree must be >= 1, got {self.degree}")
        if self.offset < 0:
            raise ParameterError(f"offset must be >= 0, got {self.offset}")
        if self.feature_dim < 2 or not _is_pow2(self.feature_dim):
            raise DimensionError(
                f"feature_dim must be a power of two >= 2, got {self.feature_dim}"
            )


def augment(x: InputVector, offset: float) -> InputVector:
    """Append sqrt(offset) as coordinate d, so <aug x, aug y> = offset + <x, y>.

    With offset 0 the vector is returned unchanged.
    """
    if offset < 0:
        raise ParameterError(f"offset must be >= 0, got {offset}")
    if offset == 0:
        return x
    return InputVector(
        x.dim + 1,
        np.append(x.indices, x.dim),
        np.append(x.values, math.sqrt(offset)),
    )


@dataclass(frozen=True)
class TensorSketchMap:
    """The frozen randomness of one feature map: p bucket hashes, p sign hashes.

    Immutable and shareable; ``apply`` is pure, so one map can sketch any
    number of vectors concurrently.
    """

    config: SketchConfig
    bucket_hashes: tuple[KWiseHash, ...]
    sign_hashes: tuple[SignHash, ...]
    effective_dim: int

    def apply(self, x: InputVector) -> np.ndarray:
        """Map x to its D-dimensional feature vector."""
        return self._features(self._sketch_stack(x))

    def apply_batch(self, xs) -> np.ndarray:
        """Map many vectors; scratch is reused but results are identical to
        calling ``apply`` per vector."""
        rows = np.empty((len(xs), self.config.feature_dim))
        scratch = None
        for i, x in enumerate(xs):
            scratch = self._sketch_stack(x, out=scratch)
            rows[i] = self._features(scratch)
        return rows

    def estimate_kernel(self, x: InputVector, y: InputVector) -> float:
        """<f(x), f(y)>: unbiased for (offset + <x, y>)^degree over map draws."""
        return float(np.dot(self.apply(x), self.apply(y)))

    def _sketch_stack(self, x: InputVector, out: np.ndarray | None = None) -> np.ndarray:
        if x.dim != self.config.input_dim:
            raise DimensionError(
                f"vector has dim {x.dim}, map expects {self.config.input_dim}"
            )
        ax = augment(x, self.config.offset)
        p, d_out = self.config.degree, self.config.feature_dim
        if out is None:
            out = np.zeros((p, d_out))
        else:
            out.fill(0.0)
        if ax.nnz:
            for j in range(p):
                buckets = self.bucket_hashes[j].evaluate_many(ax.indices)
                signs = self.sign_hashes[j].signs_many(ax.indices)
                np.add.at(out[j], buckets, signs * ax.values)
        return out

    def _features(self, sketches: np.ndarray) -> np.ndarray:
        if self.config.degree == 1:
            # a single sketch already is the feature vector; three transforms
            # would only add rounding
            return sketches[0].copy()
        spectra = fft_many(sketches)
        prod = spectra[0]
        for j in range(1, self.config.degree):
            prod = prod * spectra[j]
        return ifft_many(prod)


def build_map(config: SketchConfig) -> TensorSketchMap:
    """Sample the 2p hash functions of a map from config.seed.

    Bucket hash j uses stream 2j (pairwise independent, range D) and sign
    hash j uses stream 2j + 1 (4-wise independent), so maps with equal
    configs are identical and maps differing in seed are independent.
    """
    d_eff = config.input_dim + 1 if config.offset > 0 else config.input_dim
    buckets = tuple(
        sample_kwise(config.seed, 2 * j, 2, config.feature_dim)
        for j in range(config.degree)
    )
    signs = tuple(sample_sign(config.seed, 2 * j + 1) for j in range(config.degree))
    return TensorSketchMap(
        config=config, bucket_hashes=buckets, sign_hashes=signs, effective_dim=d_eff
    )


def explicit_tensor_sketch_oracle(x: InputVector, sketch_map: TensorSketchMap) -> np.ndarray:
    """Count-sketch the *materialized* tensor power under the composed hashes.

    Builds every coordinate prod_j x_{i_j} of the degree-p tensor power of
    the (augmented) input and scatters it into bucket
    (sum_j h_j(i_j)) mod D with sign prod_j s_j(i_j).  Exponential in p by
    design -- a brute-force reference for the FFT path, guarded at
    ``ORACLE_MAX_CELLS`` cells and used only in verification.
    """
    cfg = sketch_map.config
    if x.dim != cfg.input_dim:
        raise DimensionError(f"vector has dim {x.dim}, map expects {cfg.input_dim}")
    d_eff, p, d_out = sketch_map.effective_dim, cfg.degree, cfg.feature_dim
    if d_eff**p > ORACLE_MAX_CELLS:
        raise CapacityError(
            f"materializing {d_eff}^{p} tensor cells exceeds {ORACLE_MAX_CELLS}"
        )
    ax = augment(x, cfg.offset).to_dense()
    domain = np.arange(d_eff)
    buckets = [h.evaluate_many(domain) for h in sketch_map.bucket_hashes]
    signs = [s.signs_many(domain) for s in sketch_map.sign_hashes]

    composed_bucket = buckets[0]
    signed_entries = signs[0] * ax
    for j in range(1, p):
        composed_bucket = (composed_bucket[:, None] + buckets[j][None, :]).ravel() % d_out
        signed_entries = (signed_entries[:, None] * (signs[j] * ax)[None, :]).ravel()
    out = np.zeros(d_out)
    np.add.at(out, composed_bucket, signed_entries)
    return out


def tensor_power(x: InputVector, degree: int) -> np.ndarray:
    """Materialize x^(p): the d^p vector of all degree-p coordinate products.

    Entry (i_1..i_p), in row-major order, is prod_j x_{i_j}.  Subject to the
    same capacity guard as the sketch oracle.
    """
    if degree < 1:
        raise ParameterError(f"degree must be >= 1, got {degree}")
    if x.dim**degree > ORACLE_MAX_CELLS:
        raise CapacityError(
            f"materializing {x.dim}^{degree} tensor cells exceeds {ORACLE_MAX_CELLS}"
        )
    dense = x.to_dense()
    out = dense
    for _ in range(degree - 1):
        out = np.multiply.outer(out, dense).ravel()
    return out


def polynomial_kernel(x: InputVector, y: InputVector, degree: int, offset: float = 0.0) -> float:
    """The exact kernel (offset + <x, y>)^degree that the sketch approximates."""
    return float((offset + x.dot(y)) ** degree)
