"""Exception types shared across the package."""


class TensorSketchError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(TensorSketchError, ValueError):
    """A parameter violates its contract (bad k, range, degree, trial count...)."""


class DimensionError(TensorSketchError, ValueError):
    """A vector or transform length is wrong (not a power of two, mismatch...)."""


class CapacityError(TensorSketchError, ValueError):
    """An exact/brute-force operation was asked to exceed its size guard."""


class NumericIntegrityError(TensorSketchError, ArithmeticError):
    """A numerical sanity check failed (e.g. imaginary residue after an inverse FFT)."""


class IncompatibleSketchError(TensorSketchError, ValueError):
    """Two sketches built from different randomness were combined."""


class ParseError(TensorSketchError, ValueError):
    """Malformed input data; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
