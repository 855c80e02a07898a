"""Count Sketch / AMS sketch tests: definition oracle, linearity, statistics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorsketch import (
    DimensionError,
    IncompatibleSketchError,
    InputVector,
    KWiseHash,
    ParameterError,
    SignHash,
    ams_sketch,
    count_sketch,
    count_sketch_inner,
    run_second_moment_trials,
    sample_kwise,
    sample_sign,
)


def constant_bucket_hash(value, d_out):
    return KWiseHash((value, 0), 2, d_out)


def parity_bucket_hash(d_out):
    return KWiseHash((0, 1), 2, d_out)


def sign_from_parity():
    # base value = i mod 2, so sign is +1 on even and -1 on odd indices
    return SignHash(KWiseHash((0, 1, 0, 0), 4, 2))


def all_plus_sign():
    return SignHash(KWiseHash((0, 0, 0, 0), 4, 2))


def all_minus_sign():
    return SignHash(KWiseHash((1, 0, 0, 0), 4, 2))


def naive_count_sketch(x: InputVector, h, s):
    out = np.zeros(h.output_range)
    dense = x.to_dense()
    for i in range(x.dim):
        out[h.evaluate(i)] += s.sign(i) * dense[i]
    return out


class TestInputVector:
    def test_dense_and_sparse_agree(self):
        dense = InputVector.from_dense([0.0, 1.5, 0.0, -2.0])
        sparse = InputVector.from_pairs(4, [(1, 1.5), (3, -2.0)])
        assert dense == sparse
        assert np.array_equal(dense.to_dense(), [0.0, 1.5, 0.0, -2.0])

    def test_explicit_zeros_are_dropped(self):
        v = InputVector.from_pairs(4, [(0, 1.0), (2, 0.0), (3, 2.0)])
        assert v.nnz == 2

    def test_validation(self):
        with pytest.raises(ParameterError):
            InputVector(0, [], [])
        with pytest.raises(ParameterError):
            InputVector.from_pairs(4, [(2, 1.0), (1, 1.0)])  # not increasing
        with pytest.raises(ParameterError):
            InputVector.from_pairs(4, [(4, 1.0)])  # out of range
        with pytest.raises(ParameterError):
            InputVector.from_pairs(4, [(0, np.inf)])

    def test_dot(self):
        x = InputVector.from_pairs(5, [(0, 1.0), (3, 2.0)])
        y = InputVector.from_pairs(5, [(3, -1.0), (4, 5.0)])
        assert x.dot(y) == -2.0
        with pytest.raises(DimensionError):
            x.dot(InputVector.from_dense([1.0]))


class TestCountSketch:
    def test_single_coordinate_lands_in_one_bucket(self):
        e1 = InputVector.from_dense([1.0, 0.0, 0.0])
        cs = count_sketch(e1, constant_bucket_hash(2, 4), all_plus_sign())
        assert np.array_equal(cs.values, [0.0, 0.0, 1.0, 0.0])

    def test_fixed_hash_example(self):
        x = InputVector.from_dense([1.0, 2.0, 3.0])
        cs = count_sketch(x, parity_bucket_hash(2), sign_from_parity())
        assert np.array_equal(cs.values, [4.0, -2.0])

    def test_zero_vector_sketches_to_zero(self):
        zero = InputVector.from_dense([0.0, 0.0, 0.0])
        cs = count_sketch(zero, parity_bucket_hash(2), sign_from_parity())
        assert np.all(cs.values == 0.0)

    def test_matches_definition_oracle(self):
        rng = np.random.default_rng(0)
        for trial in range(20):
            x = InputVector.from_dense(rng.standard_normal(9))
            h = sample_kwise(trial, 0, 2, 8)
            s = sample_sign(trial, 1)
            assert np.array_equal(count_sketch(x, h, s).values, naive_count_sketch(x, h, s))

    def test_sparse_dense_agreement(self):
        h, s = sample_kwise(5, 0, 2, 8), sample_sign(5, 1)
        dense = InputVector.from_dense([0.0, 2.0, 0.0, 0.0, -3.0, 0.0])
        sparse = InputVector.from_pairs(6, [(1, 2.0), (4, -3.0)])
        assert np.array_equal(count_sketch(dense, h, s).values, count_sketch(sparse, h, s).values)

    def test_width_must_be_power_of_two(self):
        x = InputVector.from_dense([1.0])
        with pytest.raises(DimensionError):
            count_sketch(x, sample_kwise(0, 0, 2, 12), sample_sign(0, 1))

    @given(
        st.lists(st.floats(-100, 100), min_size=4, max_size=4),
        st.lists(st.floats(-100, 100), min_size=4, max_size=4),
        st.integers(min_value=0, max_value=1000),
    )
    @settings(max_examples=100, deadline=None)
    def test_linearity(self, xs, ys, hash_seed):
        h, s = sample_kwise(hash_seed, 0, 2, 8), sample_sign(hash_seed, 1)
        alpha, beta = 1.25, -0.5
        x, y = InputVector.from_dense(xs), InputVector.from_dense(ys)
        combo = InputVector.from_dense(alpha * np.asarray(xs) + beta * np.asarray(ys))
        lhs = count_sketch(combo, h, s).values
        rhs = alpha * count_sketch(x, h, s).values + beta * count_sketch(y, h, s).values
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())

    @given(
        st.lists(st.floats(-50, 50), min_size=1, max_size=12),
        st.integers(min_value=0, max_value=1000),
    )
    @settings(max_examples=100, deadline=None)
    def test_energy_below_l1_square(self, xs, hash_seed):
        x = InputVector.from_dense(xs + [1.0])  # ensure nonempty
        h, s = sample_kwise(hash_seed, 0, 2, 16), sample_sign(hash_seed, 1)
        cs = count_sketch(x, h, s)
        assert float(np.sum(cs.values**2)) <= x.norm1() ** 2 * (1 + 1e-12)


class TestAmsSketch:
    def test_single_term(self):
        e1 = InputVector.from_dense([1.0, 0.0])
        assert ams_sketch(e1, all_minus_sign()) == -1.0

    def test_second_moment_is_norm_squared(self):
        # E[Z^2] = ||x||^2 and Var(Z^2) <= 2 ||x||^4, d=8, 10^5 sampled signs
        rng = np.random.default_rng(8)
        x = InputVector.from_dense(rng.standard_normal(8))
        stats = run_second_moment_trials(x, 100_000, seed=606)
        assert stats.is_unbiased(3.0)
        assert stats.variance <= stats.bound * 1.1


class TestSketchInner:
    def test_self_inner_product_nonnegative(self):
        x = InputVector.from_dense([1.0, -2.0, 0.5])
        h, s = sample_kwise(1, 0, 2, 8), sample_sign(1, 1)
        cx = count_sketch(x, h, s)
        assert count_sketch_inner(cx, cx) >= 0.0

    def test_mismatched_randomness_is_rejected(self):
        x = InputVector.from_dense([1.0, -2.0, 0.5])
        cx = count_sketch(x, sample_kwise(1, 0, 2, 8), sample_sign(1, 1))
        cy = count_sketch(x, sample_kwise(2, 0, 2, 8), sample_sign(2, 1))
        with pytest.raises(IncompatibleSketchError):
            count_sketch_inner(cx, cy)
