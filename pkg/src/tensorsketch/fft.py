"""Radix-2 complex FFT, inverse FFT, and circular convolution.

Iterative Cooley-Tukey (decimation in time) over the last axis of an array,
so one code path serves both single vectors and batches.  Lengths are
restricted to powers of two; twiddle-factor and bit-reversal tables are
computed once per length and cached (read-only, shareable across threads).
Double precision throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericIntegrityError

#: Default ceiling on the imaginary residue after an inverse transform whose
#: result is expected to be real (relative to the output magnitude above 1).
RESIDUE_TOL = 1e-9

_tables: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _get_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _tables.get(n)
    if cached is not None:
        return cached
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev = (rev << 1) | ((np.arange(n) >> b) & 1)
    roots = np.exp(-2j * np.pi * np.arange(n // 2, dtype=np.float64) / n)
    _tables[n] = (rev, roots)
    return rev, roots


def _require_pow2(n: int) -> None:
    if not _is_pow2(n):
        raise DimensionError(f"transform length must be a power of two, got {n}")


def fft_many(values: np.ndarray) -> np.ndarray:
    """DFT along the last axis; length must be a power of two.

    Accepts real or complex input of any leading shape and returns a new
    complex128 array.  This is the batch workhorse behind ``fft``.
    """
    a = np.asarray(values)
    n = a.shape[-1]
    _require_pow2(n)
    work = np.ascontiguousarray(a, dtype=np.complex128).copy()
    if n == 1:
        return work
    rev, roots = _get_tables(n)
    work = work[..., rev]
    m = 2
    while m <= n:
        half = m // 2
        tw = roots[:: n // m][:half]
        view = work.reshape(work.shape[:-1] + (n // m, m))
        t = view[..., half:] * tw
        u = view[..., :half].copy()
        view[..., :half] = u + t
        view[..., half:] = u - t
        m <<= 1
    return work


def ifft_many(spectra: np.ndarray, residue_tol: float = RESIDUE_TOL) -> np.ndarray:
    """Inverse DFT along the last axis, asserting the result is real.

    The imaginary residue of every entry must stay below
    ``residue_tol * max(1, ||real part||_inf)``; larger residues mean the
    spectrum was not the transform of a real convolution and raise
    :class:`NumericIntegrityError`.  The (checked) imaginary part is dropped.
    """
    a = np.asarray(spectra, dtype=np.complex128)
    n = a.shape[-1]
    _require_pow2(n)
    out = np.conj(fft_many(np.conj(a))) / n
    real = out.real.copy()
    residue = np.abs(out.imag).max() if out.size else 0.0
    scale = max(1.0, np.abs(real).max()) if out.size else 1.0
    if residue > residue_tol * scale:
        raise NumericIntegrityError(
            f"imaginary residue {residue:.3e} exceeds {residue_tol:.1e} * {scale:.3e}; "
            "spectrum is not a real-signal product"
        )
    return real


@dataclass(frozen=True)
class Spectrum:
    """A power-of-two-length complex spectrum (the frequency-domain sketch)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 1:
            raise DimensionError("spectrum must be one-dimensional")
        _require_pow2(v.shape[0])
        if not np.isfinite(v.view(np.float64)).all():
            raise NumericIntegrityError("spectrum entries must be finite")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]


def fft(real_input: np.ndarray) -> Spectrum:
    """Transform a real vector of power-of-two length D into its spectrum."""
    a = np.asarray(real_input, dtype=np.float64)
    if a.ndim != 1:
        raise DimensionError("fft expects a one-dimensional vector")
    return Spectrum(fft_many(a))


def ifft(spectrum: Spectrum, residue_tol: float = RESIDUE_TOL) -> np.ndarray:
    """Invert a spectrum back to a real vector (see ``ifft_many`` for checks)."""
    return ifft_many(spectrum.values, residue_tol)


def circular_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Circular convolution: out_k = sum_{i+j = k mod D} a_i * b_j.

    Computed as the inverse transform of the component-wise spectrum product;
    both inputs must share one power-of-two length.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.ndim != 1 or bv.ndim != 1:
        raise DimensionError("circular_convolve expects one-dimensional vectors")
    if av.shape[0] != bv.shape[0]:
        raise DimensionError(
            f"length mismatch: {av.shape[0]} vs {bv.shape[0]}"
        )
    _require_pow2(av.shape[0])
    return ifft_many(fft_many(av) * fft_many(bv))
