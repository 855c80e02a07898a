"""Tensor Sketch: near-linear-time random feature maps for polynomial kernels.

The map approximates (c + <x, y>)^p by sketching the degree-p tensor power
of each vector through p Count Sketches composed with FFT convolution, in
O(nnz(x) + p D log D) per vector.  The package also ships the sketching
primitives it composes (k-wise independent hashing, Count Sketch, radix-2
FFT), two baseline estimators (AMS products, Maclaurin random features),
and a statistical harness verifying the bias/variance guarantees.
"""

from .errors import (
    CapacityError,
    DimensionError,
    IncompatibleSketchError,
    NumericIntegrityError,
    ParameterError,
    ParseError,
    TensorSketchError,
)
from .hashing import (
    MERSENNE_P,
    KWiseHash,
    SignHash,
    derive_seed,
    sample_kwise,
    sample_sign,
)
from .fft import Spectrum, circular_convolve, fft, ifft
from .sketch import (
    CountSketchVector,
    InputVector,
    ams_sketch,
    count_sketch,
    count_sketch_inner,
)
from .feature_map import (
    SketchConfig,
    TensorSketchMap,
    augment,
    build_map,
    explicit_tensor_sketch_oracle,
    polynomial_kernel,
    tensor_power,
)
from .baselines import (
    AmsTensorEstimator,
    MaclaurinMap,
    ams_pair_operation_count,
    tensor_pair_operation_count,
)
from .evaluation import (
    EstimateStats,
    GramErrorReport,
    TimingReport,
    compare_pair_times,
    gram_error,
    run_second_moment_trials,
    run_trials,
    timing_profile,
)
from .data_io import (
    Dataset,
    parse_csv_dense,
    parse_libsvm,
    read_matrix_binary,
    write_csv_dense,
    write_libsvm,
    write_matrix_binary,
    write_matrix_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AmsTensorEstimator",
    "CapacityError",
    "CountSketchVector",
    "Dataset",
    "DimensionError",
    "EstimateStats",
    "GramErrorReport",
    "IncompatibleSketchError",
    "InputVector",
    "KWiseHash",
    "MaclaurinMap",
    "MERSENNE_P",
    "NumericIntegrityError",
    "ParameterError",
    "ParseError",
    "SignHash",
    "SketchConfig",
    "Spectrum",
    "TensorSketchError",
    "TensorSketchMap",
    "TimingReport",
    "ams_pair_operation_count",
    "ams_sketch",
    "augment",
    "build_map",
    "circular_convolve",
    "compare_pair_times",
    "count_sketch",
    "count_sketch_inner",
    "derive_seed",
    "explicit_tensor_sketch_oracle",
    "fft",
    "gram_error",
    "ifft",
    "parse_csv_dense",
    "parse_libsvm",
    "polynomial_kernel",
    "read_matrix_binary",
    "run_second_moment_trials",
    "run_trials",
    "sample_kwise",
    "sample_sign",
    "tensor_pair_operation_count",
    "tensor_power",
    "timing_profile",
    "write_csv_dense",
    "write_libsvm",
    "write_matrix_binary",
    "write_matrix_csv",
]
