"""Baseline estimators of the polynomial kernel, for comparison runs.

Two classical constructions:

* ``AmsTensorEstimator`` -- products of independent AMS sign-sum sketches.
  One replica Z = prod_j Z_{s_j}(x) Z_{s_j}(y) is unbiased for <x, y>^p with
  variance at most (3^p - 1) ||x||^2p ||y||^2p; averaging D replicas divides
  the variance by D but costs O(p d D) per pair.

* ``MaclaurinMap`` -- random features built from products of Rademacher
  projections, here realized lazily through 4-wise sign hashes instead of
  materialized d-vectors.  The homogeneous mode gives one feature
  D^{-1/2} prod_{j<=p} <w_j, x>; the inhomogeneous mode randomizes the
  degree t with probability 2^-(t+1) and rescales by sqrt(a_t 2^{t+1}),
  a_t = C(p, t) c^(p-t), so the feature inner product stays unbiased for
  (c + <x, y>)^p.  Degrees above p carry no kernel mass and yield a zero
  feature.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .hashing import SignHash, draw_u64, poly_field_values, sample_sign
from .sketch import InputVector


def _sign_matrix(coeffs: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Signs of shape coeffs.shape[:-1] + indices.shape from 4-wise hashes."""
    field = poly_field_values(coeffs, indices)
    return 1.0 - 2.0 * (field & np.uint64(1)).astype(np.float64)


def _sign_sums(coeffs: np.ndarray, x: InputVector) -> np.ndarray:
    """Z_{s}(x) = sum_i s(i) x_i for every hash in a coefficient stack."""
    if x.nnz == 0:
        return np.zeros(coeffs.shape[:-1])
    return _sign_matrix(coeffs, x.indices) @ x.values


class AmsTensorEstimator:
    """Kernel estimator from D replicas of p-fold AMS sketch products."""

    def __init__(self, degree: int, replicas: int, seed: int):
        if degree < 1:
            raise ParameterError(f"degree must be >= 1, got {degree}")
        if replicas < 1:
            raise ParameterError(f"replicas must be >= 1, got {replicas}")
        self.degree = degree
        self.replicas = replicas
        self.seed = seed
        self.sign_hashes: tuple[tuple[SignHash, ...], ...] = tuple(
            tuple(sample_sign(seed, r * degree + j) for j in range(degree))
            for r in range(replicas)
        )
        self._coeffs = np.array(
            [[h.base.coefficients for h in row] for row in self.sign_hashes],
            dtype=np.uint64,
        )  # (replicas, degree, 4)

    def estimate(self, x: InputVector, y: InputVector) -> float:
        """(1/D) sum_r prod_j Z_{s_j^r}(x) Z_{s_j^r}(y); O(p d D) per pair."""
        zx = _sign_sums(self._coeffs, x)
        zy = _sign_sums(self._coeffs, y)
        return float(np.mean(np.prod(zx * zy, axis=1)))


class MaclaurinMap:
    """Random feature map from products of lazily-hashed Rademacher rows."""

    def __init__(
        self,
        degree: int,
        num_features: int,
        seed: int,
        offset: float = 0.0,
        inhomogeneous: bool = False,
    ):
        if degree < 1:
            raise ParameterError(f"degree must be >= 1, got {degree}")
        if num_features < 1:
            raise ParameterError(f"num_features must be >= 1, got {num_features}")
        if offset < 0:
            raise ParameterError(f"offset must be >= 0, got {offset}")
        if offset > 0 and not inhomogeneous:
            raise ParameterError("a nonzero offset requires inhomogeneous mode")
        self.degree = degree
        self.num_features = num_features
        self.seed = seed
        self.offset = offset
        self.inhomogeneous = inhomogeneous
        self.sign_hashes: tuple[tuple[SignHash, ...], ...] = tuple(
            tuple(sample_sign(seed, r * degree + j) for j in range(degree))
            for r in range(num_features)
        )
        self._coeffs = np.array(
            [[h.base.coefficients for h in row] for row in self.sign_hashes],
            dtype=np.uint64,
        )  # (num_features, degree, 4)
        if inhomogeneous:
            draws = np.array(
                [
                    draw_u64(seed, num_features * degree + r)
                    for r in range(num_features)
                ],
                dtype=np.uint64,
            )
            self.row_degrees = _geometric_degrees(draws)
            self.row_scales = degree_scales(degree, offset, self.row_degrees)
        else:
            self.row_degrees = np.full(num_features, degree, dtype=np.int64)
            self.row_scales = np.ones(num_features)

    def features(self, x: InputVector) -> np.ndarray:
        """Feature r = D^{-1/2} * scale_r * prod_{j <= t_r} <w_j^r, x>."""
        z = _sign_sums(self._coeffs, x)  # (num_features, degree)
        prods = _truncated_row_products(z, self.row_degrees)
        return (self.row_scales * prods) / math.sqrt(self.num_features)

    def estimate(self, x: InputVector, y: InputVector) -> float:
        return float(np.dot(self.features(x), self.features(y)))


def _geometric_degrees(draws: np.ndarray) -> np.ndarray:
    """Degree t with probability 2^-(t+1): index of the lowest set bit."""
    lowbit = draws & (~draws + np.uint64(1))
    t = np.where(
        draws == 0, 64, np.log2(np.maximum(lowbit, np.uint64(1)).astype(np.float64))
    )
    return t.astype(np.int64)


def degree_scales(degree: int, offset: float, row_degrees: np.ndarray) -> np.ndarray:
    """sqrt(a_t * 2^(t+1)) with a_t = C(p, t) offset^(p-t); zero for t > p."""
    scales = np.zeros(row_degrees.shape[0])
    for t in range(degree + 1):
        a_t = math.comb(degree, t) * offset ** (degree - t)
        scales[row_degrees == t] = math.sqrt(a_t * 2.0 ** (t + 1))
    return scales


def _truncated_row_products(z: np.ndarray, row_degrees: np.ndarray) -> np.ndarray:
    """prod of the first t_r entries of row r (empty product = 1, t > p = 0)."""
    degree = z.shape[-1]
    cumulative = np.cumprod(z, axis=-1)
    out = np.ones(z.shape[:-1])
    for t in range(1, degree + 1):
        mask = row_degrees == t
        out[mask] = cumulative[mask, t - 1]
    out[row_degrees > degree] = 0.0
    return out


def ams_pair_operation_count(input_dim: int, replicas: int, degree: int) -> int:
    """Multiply-adds per kernel estimate: both vectors, all replica sketches."""
    return 2 * degree * replicas * input_dim


def tensor_pair_operation_count(input_dim: int, feature_dim: int, degree: int) -> int:
    """Multiply-adds per kernel estimate through the FFT-composed sketch."""
    if degree == 1:
        per_vector = input_dim
    else:
        transforms = (degree + 1) * (feature_dim // 2) * int(math.log2(feature_dim))
        per_vector = degree * input_dim + transforms + (degree - 1) * feature_dim
    return 2 * per_vector + feature_dim
