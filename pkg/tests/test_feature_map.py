"""Feature map tests: determinism, degenerate cases, oracle equivalence."""

import numpy as np
import pytest

from tensorsketch import (
    CapacityError,
    DimensionError,
    InputVector,
    ParameterError,
    SketchConfig,
    augment,
    build_map,
    count_sketch,
    explicit_tensor_sketch_oracle,
    polynomial_kernel,
    tensor_power,
)


def vec(*values):
    return InputVector.from_dense(np.asarray(values, dtype=float))


class TestConfig:
    def test_validation(self):
        with pytest.raises(DimensionError):
            SketchConfig(4, 12, 2)  # not a power of two
        with pytest.raises(DimensionError):
            SketchConfig(4, 1, 2)
        with pytest.raises(ParameterError):
            SketchConfig(4, 8, 0)
        with pytest.raises(ParameterError):
            SketchConfig(4, 8, 2, offset=-1.0)
        with pytest.raises(ParameterError):
            SketchConfig(0, 8, 2)


class TestBuildMap:
    def test_identical_configs_produce_identical_features(self):
        x = vec(0.3, -1.2, 0.5, 2.0)
        cfg = SketchConfig(4, 8, 2, 0.0, 99)
        assert np.array_equal(build_map(cfg).apply(x), build_map(cfg).apply(x))

    def test_seed_changes_features(self):
        x = vec(0.3, -1.2, 0.5, 2.0)
        a = build_map(SketchConfig(4, 8, 2, 0.0, 1)).apply(x)
        b = build_map(SketchConfig(4, 8, 2, 0.0, 2)).apply(x)
        assert not np.array_equal(a, b)

    def test_degree_one_equals_count_sketch_exactly(self):
        x = vec(0.3, -1.2, 0.5, 2.0)
        sketch_map = build_map(SketchConfig(4, 8, 1, 0.0, 7))
        plain = count_sketch(x, sketch_map.bucket_hashes[0], sketch_map.sign_hashes[0])
        assert np.array_equal(sketch_map.apply(x), plain.values)

    def test_offset_extends_hash_domain(self):
        assert build_map(SketchConfig(4, 8, 2, 0.0, 0)).effective_dim == 4
        assert build_map(SketchConfig(4, 8, 2, 2.5, 0)).effective_dim == 5


class TestAugment:
    def test_zero_offset_is_identity(self):
        x = vec(1.0, 2.0)
        assert augment(x, 0.0) is x

    def test_dot_product_gains_offset(self):
        ax, ay = augment(vec(1.0, 2.0), 4.0), augment(vec(3.0, -1.0), 4.0)
        assert ax.dot(ay) == 5.0 == 4.0 + vec(1.0, 2.0).dot(vec(3.0, -1.0))

    def test_zero_vector_with_offset_has_exact_self_kernel(self):
        zero = InputVector.from_pairs(3, [])
        for p in (1, 2, 3):
            sketch_map = build_map(SketchConfig(3, 8, p, 9.0, 11))
            f = sketch_map.apply(zero)
            assert abs(float(f @ f) - 9.0**p) <= 1e-9 * 9.0**p

    def test_negative_offset_rejected(self):
        with pytest.raises(ParameterError):
            augment(vec(1.0), -0.5)


class TestApply:
    def test_basis_vector_maps_to_signed_basis_vector(self):
        e1 = vec(1.0, 0.0, 0.0)
        for p in (1, 2, 3):
            f = build_map(SketchConfig(3, 8, p, 0.0, 5)).apply(e1)
            top = np.abs(f).max()
            assert abs(top - 1.0) <= 1e-12
            assert np.sort(np.abs(f))[:-1].max() <= 1e-12
            assert abs(float(f @ f) - 1.0) <= 1e-12

    def test_homogeneous_scaling(self):
        x = vec(0.4, -0.8, 1.1)
        for p in (1, 2, 3):
            sketch_map = build_map(SketchConfig(3, 16, p, 0.0, 3))
            lhs = sketch_map.apply(InputVector.from_dense(2.0 * x.to_dense()))
            rhs = 2.0**p * sketch_map.apply(x)
            assert np.abs(lhs - rhs).max() <= 1e-9 * max(1.0, np.abs(rhs).max())

    def test_dimension_mismatch(self):
        sketch_map = build_map(SketchConfig(3, 8, 2, 0.0, 0))
        with pytest.raises(DimensionError):
            sketch_map.apply(vec(1.0, 2.0))

    def test_batch_is_bit_identical_to_single(self):
        rng = np.random.default_rng(17)
        xs = [InputVector.from_dense(rng.standard_normal(5)) for _ in range(8)]
        sketch_map = build_map(SketchConfig(5, 16, 3, 1.5, 23))
        batch = sketch_map.apply_batch(xs)
        for i, x in enumerate(xs):
            assert np.array_equal(batch[i], sketch_map.apply(x))


class TestOracle:
    def test_degree_one_oracle_is_count_sketch(self):
        x = vec(0.5, -2.0, 1.0)
        sketch_map = build_map(SketchConfig(3, 4, 1, 0.0, 2))
        oracle = explicit_tensor_sketch_oracle(x, sketch_map)
        assert np.allclose(
            oracle,
            count_sketch(x, sketch_map.bucket_hashes[0], sketch_map.sign_hashes[0]).values,
        )

    def test_fft_path_matches_materialization(self):
        x = vec(0.7, -1.3)
        sketch_map = build_map(SketchConfig(2, 4, 3, 0.0, 13))
        assert np.abs(sketch_map.apply(x) - explicit_tensor_sketch_oracle(x, sketch_map)).max() < 1e-9

    def test_fft_path_matches_materialization_with_offset(self):
        rng = np.random.default_rng(29)
        x = InputVector.from_dense(rng.standard_normal(3))
        sketch_map = build_map(SketchConfig(3, 8, 2, 2.0, 31))
        assert np.abs(sketch_map.apply(x) - explicit_tensor_sketch_oracle(x, sketch_map)).max() < 1e-9

    def test_capacity_guard(self):
        big = InputVector.from_dense(np.ones(101))
        sketch_map = build_map(SketchConfig(101, 8, 3, 0.0, 0))
        with pytest.raises(CapacityError):
            explicit_tensor_sketch_oracle(big, sketch_map)


class TestTensorPower:
    def test_row_major_ordering(self):
        got = tensor_power(vec(2.0, 3.0), 2)
        assert np.array_equal(got, [4.0, 6.0, 6.0, 9.0])

    def test_inner_product_identity(self):
        rng = np.random.default_rng(41)
        x, y = rng.standard_normal((2, 4))
        xv, yv = InputVector.from_dense(x), InputVector.from_dense(y)
        for p in (1, 2, 3):
            lhs = float(np.dot(tensor_power(xv, p), tensor_power(yv, p)))
            rhs = polynomial_kernel(xv, yv, p)
            assert abs(lhs - rhs) <= 1e-9 * abs(rhs)

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            tensor_power(InputVector.from_dense(np.ones(101)), 3)


class TestEstimateKernel:
    def test_basis_self_kernel_is_one(self):
        e1 = vec(1.0, 0.0, 0.0, 0.0)
        for p, seed in ((1, 0), (2, 5), (3, 9)):
            sketch_map = build_map(SketchConfig(4, 16, p, 0.0, seed))
            assert abs(sketch_map.estimate_kernel(e1, e1) - 1.0) <= 1e-12
