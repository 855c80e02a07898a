"""FFT tests against naive O(D^2) oracles, round trips, and algebraic laws."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorsketch import DimensionError, NumericIntegrityError, Spectrum, circular_convolve, fft, ifft
from tensorsketch.fft import fft_many, ifft_many


def naive_dft(x):
    """Direct O(D^2) evaluation of the transform definition."""
    n = len(x)
    k = np.arange(n)
    return np.asarray(x, dtype=complex) @ np.exp(-2j * np.pi * np.outer(k, k) / n)


def naive_circular_convolution(a, b):
    n = len(a)
    out = np.zeros(n)
    for i in range(n):
        for j in range(n):
            out[(i + j) % n] += a[i] * b[j]
    return out


def test_delta_transforms_to_constant():
    assert np.allclose(fft(np.array([1.0, 0.0, 0.0, 0.0])).values, np.ones(4))


def test_constant_transforms_to_delta():
    assert np.allclose(fft(np.ones(4)).values, [4, 0, 0, 0])


def test_fft_of_zero_is_zero():
    assert np.all(fft(np.zeros(8)).values == 0)


def test_fft_matches_naive_dft():
    rng = np.random.default_rng(0)
    for n in (1, 2, 4, 8, 16, 64):
        x = rng.standard_normal(n)
        assert np.abs(fft(x).values - naive_dft(x)).max() < 1e-10


def test_roundtrip_examples():
    v = np.array([3.0, -1.0, 2.0, 0.0])
    assert np.abs(ifft(fft(v)) - v).max() < 1e-10
    assert np.allclose(ifft(Spectrum(np.array([4.0, 0, 0, 0], dtype=complex))), np.ones(4))


def test_roundtrip_random():
    rng = np.random.default_rng(1)
    v = rng.standard_normal(16)
    assert np.abs(ifft(fft(v)) - v).max() < 1e-10


@given(st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=2**32))
@settings(max_examples=60, deadline=None)
def test_roundtrip_property(log_n, seed):
    v = np.random.default_rng(seed).standard_normal(2**log_n)
    assert np.abs(ifft_many(fft_many(v)) - v).max() < 1e-10


def test_parseval():
    rng = np.random.default_rng(2)
    for n in (2, 16, 1 << 12):
        v = rng.standard_normal(n)
        lhs = float(np.sum(np.abs(fft(v).values) ** 2))
        rhs = n * float(np.sum(v**2))
        assert abs(lhs - rhs) <= 1e-9 * rhs


def test_linearity():
    rng = np.random.default_rng(3)
    a, b = rng.standard_normal((2, 32))
    alpha, beta = 1.7, -0.3
    lhs = fft(alpha * a + beta * b).values
    rhs = alpha * fft(a).values + beta * fft(b).values
    assert np.abs(lhs - rhs).max() < 1e-10


def test_convolve_with_delta_is_identity():
    b = np.array([5.0, 6.0, 7.0, 8.0])
    delta = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.abs(circular_convolve(delta, b) - b).max() < 1e-10


def test_convolve_with_shifted_delta_rotates():
    b = np.array([1.0, 2.0, 3.0, 4.0])
    shift = np.array([0.0, 1.0, 0.0, 0.0])
    assert np.abs(circular_convolve(shift, b) - [4, 1, 2, 3]).max() < 1e-10


def test_convolution_matches_naive_oracle():
    rng = np.random.default_rng(4)
    for n in (1, 2, 4, 8, 16):
        for _ in range(100):
            a, b = rng.standard_normal((2, n))
            got = circular_convolve(a, b)
            want = naive_circular_convolution(a, b)
            assert np.abs(got - want).max() < 1e-10


def test_batch_transform_matches_single():
    rng = np.random.default_rng(5)
    block = rng.standard_normal((3, 5, 16))
    batch = fft_many(block)
    for i in range(3):
        for j in range(5):
            assert np.array_equal(batch[i, j], fft_many(block[i, j]))


def test_non_power_of_two_is_rejected():
    with pytest.raises(DimensionError):
        fft(np.zeros(12))
    with pytest.raises(DimensionError):
        fft(np.zeros(0))
    with pytest.raises(DimensionError):
        circular_convolve(np.zeros(4), np.zeros(8))


def test_imaginary_residue_is_detected():
    # a non-Hermitian spectrum cannot be the transform of a real signal
    junk = Spectrum(np.array([1j, 0.0, 0.0, 0.0]))
    with pytest.raises(NumericIntegrityError):
        ifft(junk)


def test_residue_tolerance_scales_with_magnitude():
    # large-norm data must not trip the residue check
    v = np.full(1 << 10, 1e6)
    spectra = fft_many(v) * fft_many(v) * fft_many(v)
    out = ifft_many(spectra)
    assert np.isfinite(out).all()


def test_spectrum_rejects_nan():
    with pytest.raises(NumericIntegrityError):
        Spectrum(np.array([np.nan + 0j, 0, 0, 0]))
