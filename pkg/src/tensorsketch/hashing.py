"""Seedable k-wise independent hash families over the Mersenne-61 prime field.

A hash is a random degree-(k-1) polynomial with coefficients uniform in
[0, P-1], P = 2^61 - 1, evaluated exactly (no overflow) and folded into the
bucket range with a plain ``mod range``.  Values of such a polynomial at any
k distinct points are jointly uniform over the field, which gives exact
k-wise independence before the range fold; the fold adds a per-bucket bias
of at most range/P (~ range * 4.3e-19), negligible at any realistic range.

Randomness comes from splitmix64.  A hash keyed by ``(seed, stream_id)``
starts the generator at state

    mix64(seed XOR mix64(stream_id + GOLDEN))

where mix64 is the splitmix64 output finalizer and GOLDEN is its increment
0x9E3779B97F4A7C15, then draws coefficients by rejection on 61-bit values
(only the single value 2^61 - 1 is rejected).  The construction is fully
deterministic: identical inputs reproduce identical hashes bit for bit,
and distinct stream ids start at unrelated states (no stream overlap).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

MERSENNE_P = (1 << 61) - 1

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_C1 = 0xBF58476D1CE4E5B9
_MIX_C2 = 0x94D049BB133111EB
_DERIVE_SALT = 0x6A09E667F3BCC909

_U64_GOLDEN = np.uint64(_GOLDEN)
_U64_C1 = np.uint64(_MIX_C1)
_U64_C2 = np.uint64(_MIX_C2)
_U64_P = np.uint64(MERSENNE_P)
_U64_LOW32 = np.uint64(0xFFFFFFFF)
_U64_LOW29 = np.uint64((1 << 29) - 1)


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_C1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_C2) & _MASK64
    return z ^ (z >> 31)


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _U64_C1
    z = (z ^ (z >> np.uint64(27))) * _U64_C2
    return z ^ (z >> np.uint64(31))


def _stream_state(seed: int, stream_id: int) -> int:
    return _mix64((seed & _MASK64) ^ _mix64((stream_id + _GOLDEN) & _MASK64))


def derive_seed(seed: int, index: int) -> int:
    """Derive the index-th child seed of a master seed (for trial streams)."""
    return _mix64((seed & _MASK64) ^ _mix64((index + _DERIVE_SALT) & _MASK64))


def _mulmod_p(a: np.ndarray, b) -> np.ndarray:
    # (a * b) mod P for uint64 operands < P, exact via 32-bit limb split:
    # a*b = a1*b1*2^64 + (a1*b0 + a0*b1)*2^32 + a0*b0, and 2^61 = 1 (mod P),
    # so every partial product folds with shifts; all intermediates < 2^63.
    a1 = a >> np.uint64(32)
    a0 = a & _U64_LOW32
    b1 = b >> np.uint64(32)
    b0 = b & _U64_LOW32
    hi = a1 * b1
    mid = a1 * b0 + a0 * b1
    lo = a0 * b0
    mid_fold = (mid >> np.uint64(29)) + ((mid & _U64_LOW29) << np.uint64(32))
    lo_fold = (lo >> np.uint64(61)) + (lo & _U64_P)
    t = hi * np.uint64(8) + mid_fold + lo_fold
    r = (t >> np.uint64(61)) + (t & _U64_P)
    return np.where(r >= _U64_P, r - _U64_P, r)


def _addmod_p(a: np.ndarray, b) -> np.ndarray:
    s = a + b
    r = (s >> np.uint64(61)) + (s & _U64_P)
    return np.where(r >= _U64_P, r - _U64_P, r)


def poly_field_values(coefficients: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Evaluate Horner polynomials over the Mersenne-61 field, exactly.

    ``coefficients`` has shape (..., k) with coefficient t multiplying i^t;
    ``indices`` has shape (m,).  Returns field values of shape (..., m),
    broadcasting the leading axes, bit-identical to scalar evaluation.
    """
    coeffs = np.asarray(coefficients, dtype=np.uint64)
    idx = np.asarray(indices, dtype=np.uint64)
    k = coeffs.shape[-1]
    acc = np.broadcast_to(coeffs[..., k - 1 : k], coeffs.shape[:-1] + idx.shape).copy()
    for t in range(k - 2, -1, -1):
        acc = _addmod_p(_mulmod_p(acc, idx), coeffs[..., t : t + 1])
    return acc


@dataclass(frozen=True)
class KWiseHash:
    """A degree-(k-1) Carter-Wegman polynomial hash into [0, output_range).

    Immutable; evaluation is pure and O(k), safe to share across workers.
    """

    coefficients: tuple[int, ...]
    independence_k: int
    output_range: int

    def __post_init__(self):
        if self.independence_k < 2:
            raise ParameterError("independence_k must be >= 2")
        if self.output_range < 2:
            raise ParameterError("output_range must be >= 2")
        if len(self.coefficients) != self.independence_k:
            raise ParameterError("need exactly independence_k coefficients")
        if any(c < 0 or c >= MERSENNE_P for c in self.coefficients):
            raise ParameterError("coefficients must lie in [0, 2^61 - 2]")

    def evaluate(self, i: int) -> int:
        """Bucket of index i: ((sum_t a_t * i^t) mod P) mod range."""
        if i < 0:
            raise ParameterError("hash input must be non-negative")
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * i + c) % MERSENNE_P
        return acc % self.output_range

    def evaluate_many(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized ``evaluate`` over an int array (caller ensures >= 0)."""
        coeffs = np.asarray(self.coefficients, dtype=np.uint64)
        field = poly_field_values(coeffs, indices)
        return (field % np.uint64(self.output_range)).astype(np.int64)

    def key(self) -> tuple:
        """Value identity of this hash; equal keys mean identical behavior."""
        return (self.independence_k, self.output_range, self.coefficients)


@dataclass(frozen=True)
class SignHash:
    """A 4-wise independent sign function i -> {-1, +1}.

    Wraps a k=4, range=2 field hash; base output 0 maps to +1 and 1 to -1.
    """

    base: KWiseHash

    def __post_init__(self):
        if self.base.independence_k != 4 or self.base.output_range != 2:
            raise ParameterError("sign hash requires a k=4, range=2 base hash")

    def sign(self, i: int) -> int:
        return 1 - 2 * self.base.evaluate(i)

    def signs_many(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized signs as float64 (+1.0 / -1.0)."""
        coeffs = np.asarray(self.base.coefficients, dtype=np.uint64)
        field = poly_field_values(coeffs, indices)
        return 1.0 - 2.0 * (field & np.uint64(1)).astype(np.float64)

    def key(self) -> tuple:
        return self.base.key()


def sample_kwise(seed: int, stream_id: int, k: int, output_range: int) -> KWiseHash:
    """Draw a k-wise independent hash, deterministically keyed by (seed, stream_id)."""
    if k < 2:
        raise ParameterError(f"independence k must be >= 2, got {k}")
    if output_range < 2:
        raise ParameterError(f"output range must be >= 2, got {output_range}")
    if output_range > 1 << 32:
        raise ParameterError(f"output range must be <= 2^32, got {output_range}")
    state = _stream_state(seed, stream_id)
    coeffs = []
    for _ in range(k):
        while True:
            state = (state + _GOLDEN) & _MASK64
            v = _mix64(state) >> 3
            if v < MERSENNE_P:  # rejects only the single value 2^61 - 1
                break
        coeffs.append(v)
    return KWiseHash(tuple(coeffs), k, output_range)


def sample_sign(seed: int, stream_id: int) -> SignHash:
    """Draw a 4-wise independent sign hash (convenience over ``sample_kwise``)."""
    return SignHash(sample_kwise(seed, stream_id, 4, 2))


def _draw_field_elements(states: np.ndarray, k: int) -> np.ndarray:
    """Advance each splitmix state k times, rejection-sampling field elements."""
    out = np.empty((states.shape[0], k), dtype=np.uint64)
    for slot in range(k):
        states += _U64_GOLDEN
        v = _mix64_vec(states) >> np.uint64(3)
        bad = v >= _U64_P
        while bad.any():  # probability 2^-61 per draw; loop exists for exactness
            states[bad] = states[bad] + _U64_GOLDEN
            v[bad] = _mix64_vec(states[bad]) >> np.uint64(3)
            bad = v >= _U64_P
        out[:, slot] = v
    return out


def sample_coefficients_batch(seed: int, stream_ids: np.ndarray, k: int) -> np.ndarray:
    """Coefficients for many streams at once, shape (len(stream_ids), k).

    Bit-identical to calling ``sample_kwise(seed, sid, k, ...)`` per stream;
    used by the Monte Carlo harness where Python-level sampling would dominate.
    """
    ids = np.asarray(stream_ids, dtype=np.uint64)
    seed64 = np.uint64(seed & _MASK64)
    states = _mix64_vec(seed64 ^ _mix64_vec(ids + _U64_GOLDEN))
    return _draw_field_elements(states, k)


def derive_seeds(seed: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized ``derive_seed`` over an index array (uint64 result)."""
    idx = np.asarray(indices, dtype=np.uint64)
    seed64 = np.uint64(seed & _MASK64)
    return _mix64_vec(seed64 ^ _mix64_vec(idx + np.uint64(_DERIVE_SALT)))


def sample_coefficients_across_seeds(
    seeds: np.ndarray, stream_id: int, k: int
) -> np.ndarray:
    """One stream's coefficients under many seeds, shape (len(seeds), k).

    Bit-identical to ``sample_kwise(seed_i, stream_id, k, ...)`` per seed.
    """
    seeds64 = np.asarray(seeds, dtype=np.uint64)
    stream_mix = np.uint64(_mix64((stream_id + _GOLDEN) & _MASK64))
    states = _mix64_vec(seeds64 ^ stream_mix)
    return _draw_field_elements(states, k)


def draw_u64(seed: int, stream_id: int) -> int:
    """First raw 64-bit output of the (seed, stream_id) stream."""
    state = (_stream_state(seed, stream_id) + _GOLDEN) & _MASK64
    return _mix64(state)


def draw_u64_across_seeds(seeds: np.ndarray, stream_id: int) -> np.ndarray:
    """Vectorized ``draw_u64`` over many seeds."""
    seeds64 = np.asarray(seeds, dtype=np.uint64)
    stream_mix = np.uint64(_mix64((stream_id + _GOLDEN) & _MASK64))
    states = _mix64_vec(seeds64 ^ stream_mix) + _U64_GOLDEN
    return _mix64_vec(states)
