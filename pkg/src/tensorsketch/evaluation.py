"""Statistical verification harness: bias/variance trials, Gram error, timing.

Monte Carlo runs draw one fresh estimator per trial, with trial t seeded by
``derive_seed(master_seed, t)``, so a run is reproducible bit for bit and
trivially parallel over trials.  The heavy loops are vectorized across
trials in fixed-size chunks; chunking never changes per-trial arithmetic,
so results are independent of the chunk size.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from statistics import median

import numpy as np

from .baselines import AmsTensorEstimator,MaclaurinMap, degree_scales
from .errors import CapacityError, DimensionError, ParameterError
from .feature_map import SketchConfig, augment, build_map, polynomial_kernel
from .fft import fft_many, ifft_many
from .hashing import (
    derive_seeds,
    draw_u64_across_seeds,
    poly_field_values,
    sample_coefficients_across_seeds,
)
from .sketch import InputVector

ESTIMATOR_KINDS = ("tensor", "ams", "maclaurin")

#: Trials processed per vectorized batch; results do not depend on this.
TRIAL_CHUNK = 8192

#: Exact Gram matrices are O(n^2 d); refuse silly sizes.
GRAM_MAX_VECTORS = 10**4

MIN_TRIALS = 100
MIN_TIMING_REPETITIONS = 5


@dataclass(frozen=True)
class EstimateStats:
    """Empirical mean/variance of a kernel estimator against its guarantees."""

    trials: int
    mean: float
    variance: float
    std_error: float
    target: float
    bound: float | None

    def __post_init__(self):
        if self.trials < 2:
            raise ParameterError("stats need at least 2 trials")
        if self.variance < 0:
            raise ParameterError("variance cannot be negative")
        expected_se = math.sqrt(self.variance / self.trials)
        if not math.isclose(self.std_error, expected_se, rel_tol=1e-12, abs_tol=1e-300):
            raise ParameterError("std_error inconsistent with variance/trials")

    def is_unbiased(self, z: float = 3.0) -> bool:
        """|mean - target| within z standard errors."""
        return abs(self.mean - self.target) <= z * self.std_error

    def variance_ok(self, slack: float = 1.05) -> bool:
        """Empirical variance within the theoretical bound (with MC slack)."""
        return self.bound is None or self.variance <= self.bound * slack


@dataclass(frozen=True)
class GramErrorReport:
    """Aggregate kernel-matrix approximation error under one shared map."""

    n: int
    feature_dim: int
    degree: int
    offset: float
    seed: int
    frobenius_rel_error: float
    max_abs_entry_error: float


@dataclass(frozen=True)
class TimingReport:
    """Per-vector sketching time across a sweep of feature dimensions."""

    input_dim: int
    n_vectors: int
    degree: int
    rows: tuple[tuple[int, float], ...]

    def violations(
        self, max_quadrupling_ratio: float = 8.0, monotone_slack: float = 0.05
    ) -> list[str]:
        """Check the loose wall-clock contracts; empty list means pass.

        Medians must be non-decreasing in D (up to ``monotone_slack`` noise)
        and quadrupling D must cost less than ``max_quadrupling_ratio`` x
        (quadratic growth would cost 16x, D log D about 5x).
        """
        problems = []
        for (d_lo, t_lo), (d_hi, t_hi) in zip(self.rows, self.rows[1:]):
            if t_hi < t_lo * (1.0 - monotone_slack):
                problems.append(
                    f"time({d_hi})={t_hi:.3e} < time({d_lo})={t_lo:.3e}: not monotone"
                )
        by_dim = dict(self.rows)
        for d_lo, t_lo in self.rows:
            t_hi = by_dim.get(4 * d_lo)
            if t_hi is not None and t_hi >= max_quadrupling_ratio * t_lo:
                problems.append(
                    f"time({4 * d_lo})/time({d_lo}) = {t_hi / t_lo:.2f} "
                    f">= {max_quadrupling_ratio}"
                )
        return problems


def _signs_from_field(field: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * (field & np.uint64(1)).astype(np.float64)


def _batch_sign_sums(coeffs: np.ndarray, x: InputVector) -> np.ndarray:
    """Z_s(x) for a (..., 4) stack of sign-hash coefficients."""
    if x.nnz == 0:
        return np.zeros(coeffs.shape[:-1])
    signs = _signs_from_field(poly_field_values(coeffs, x.indices))
    return signs @ x.values


def _batch_tensor_features(
    x: InputVector, bucket_coeffs: np.ndarray, sign_coeffs: np.ndarray, feature_dim: int
) -> np.ndarray:
    """Feature rows for many trial maps at once; mirrors TensorSketchMap.apply."""
    n_trials, degree = bucket_coeffs.shape[0], bucket_coeffs.shape[1]
    sketches = np.zeros((n_trials, degree, feature_dim))
    if x.nnz:
        buckets = (
            poly_field_values(bucket_coeffs, x.indices) % np.uint64(feature_dim)
        ).astype(np.int64)
        signs = _signs_from_field(poly_field_values(sign_coeffs, x.indices))
        contrib = signs * x.values
        row_base = np.arange(n_trials * degree, dtype=np.int64)[:, None] * feature_dim
        flat_idx = (row_base + buckets.reshape(n_trials * degree, -1)).ravel()
        np.add.at(sketches.reshape(-1), flat_idx, contrib.ravel())
    if degree == 1:
        return sketches[:, 0, :].copy()
    spectra = fft_many(sketches)
    prod = spectra[:, 0]
    for j in range(1, degree):
        prod = prod * spectra[:, j]
    return ifft_many(prod)


def _tensor_chunk(
    ax: InputVector, ay: InputVector, config: SketchConfig, seeds: np.ndarray
) -> np.ndarray:
    p = config.degree
    bucket_coeffs = np.stack(
        [sample_coefficients_across_seeds(seeds, 2 * j, 2) for j in range(p)], axis=1
    )
    sign_coeffs = np.stack(
        [sample_coefficients_across_seeds(seeds, 2 * j + 1, 4) for j in range(p)],
        axis=1,
    )
    fx = _batch_tensor_features(ax, bucket_coeffs, sign_coeffs, config.feature_dim)
    fy = _batch_tensor_features(ay, bucket_coeffs, sign_coeffs, config.feature_dim)
    return np.einsum("td,td->t", fx, fy)


def _pair_sign_coeffs(seeds: np.ndarray, replicas: int, degree: int) -> np.ndarray:
    stacks = [
        np.stack(
            [
                sample_coefficients_across_seeds(seeds, r * degree + j, 4)
                for j in range(degree)
            ],
            axis=1,
        )
        for r in range(replicas)
    ]
    return np.stack(stacks, axis=1)  # (trials, replicas, degree, 4)


def _ams_estimates(
    ax: InputVector, ay: InputVector, replicas: int, degree: int, seeds: np.ndarray
) -> np.ndarray:
    coeffs = _pair_sign_coeffs(seeds, replicas, degree)
    zx = _batch_sign_sums(coeffs, ax)
    zy = _batch_sign_sums(coeffs, ay)
    return np.mean(np.prod(zx * zy, axis=-1), axis=-1)


def _ams_chunk(
    ax: InputVector, ay: InputVector, config: SketchConfig, seeds: np.ndarray
) -> np.ndarray:
    return _ams_estimates(ax, ay, config.feature_dim, config.degree, seeds)


def _maclaurin_chunk(
    x: InputVector, y: InputVector, config: SketchConfig, seeds: np.ndarray
) -> np.ndarray:
    replicas, degree = config.feature_dim, config.degree
    coeffs = _pair_sign_coeffs(seeds, replicas, degree)
    zx = _batch_sign_sums(coeffs, x)
    zy = _batch_sign_sums(coeffs, y)
    if config.offset == 0:
        px = np.prod(zx, axis=-1)
        py = np.prod(zy, axis=-1)
        return np.sum(px * py, axis=-1) / replicas
    draws = np.stack(
        [
            draw_u64_across_seeds(seeds, replicas * degree + r)
            for r in range(replicas)
        ],
        axis=1,
    )
    lowbit = draws & (~draws + np.uint64(1))
    degrees = np.where(
        draws == 0, 64, np.log2(np.maximum(lowbit, np.uint64(1)).astype(np.float64))
    ).astype(np.int64)
    scales = degree_scales(degree, config.offset, degrees.ravel()).reshape(degrees.shape)
    px = _truncated_products(zx, degrees)
    py = _truncated_products(zy, degrees)
    return np.sum(scales**2 * px * py, axis=-1) / replicas


def _truncated_products(z: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    """Products of the first t entries along the last axis (t=0 -> 1, t>p -> 0)."""
    p = z.shape[-1]
    cumulative = np.cumprod(z, axis=-1)
    clipped = np.clip(degrees, 1, p) - 1
    gathered = np.take_along_axis(cumulative, clipped[..., None], axis=-1)[..., 0]
    return np.where(degrees == 0, 1.0, np.where(degrees > p, 0.0, gathered))


def run_trials(
    estimator_kind: str,
    x: InputVector,
    y: InputVector,
    config: SketchConfig,
    trials: int,
    seed: int,
) -> EstimateStats:
    """Empirical bias/variance of a kernel estimator over independent draws.

    Each trial builds a fresh estimator from ``derive_seed(seed, t)`` and
    estimates the kernel of (x, y).  ``target`` is the exact kernel value
    and ``bound`` the theoretical variance ceiling for the estimator kind:
    (3^p - 1)/D * ||x||^2p ||y||^2p for the sketch map and the homogeneous
    Maclaurin features, the same without 1/D for a single-replica AMS
    product, and absent for inhomogeneous Maclaurin features.  Norms are
    those of the augmented vectors when offset > 0 (they are what is
    sketched).
    """
    if estimator_kind not in ESTIMATOR_KINDS:
        raise ParameterError(f"unknown estimator kind {estimator_kind!r}")
    if trials < MIN_TRIALS:
        raise ParameterError(f"need at least {MIN_TRIALS} trials, got {trials}")
    if x.dim != config.input_dim or y.dim != config.input_dim:
        raise DimensionError("x and y must match config.input_dim")

    ax, ay = augment(x, config.offset), augment(y, config.offset)
    if estimator_kind == "maclaurin":
        chunk_fn, cx, cy = _maclaurin_chunk, x, y  # offset handled by degree mix
    elif estimator_kind == "ams":
        chunk_fn, cx, cy = _ams_chunk, ax, ay
    else:
        chunk_fn, cx, cy = _tensor_chunk, ax, ay

    estimates = np.empty(trials)
    for lo in range(0, trials, TRIAL_CHUNK):
        hi = min(lo + TRIAL_CHUNK, trials)
        seeds = derive_seeds(seed, np.arange(lo, hi, dtype=np.uint64))
        estimates[lo:hi] = chunk_fn(cx, cy, config, seeds)

    p = config.degree
    norm_power = (ax.norm() * ay.norm()) ** (2 * p)
    if estimator_kind == "ams":
        bound = (3.0**p - 1.0) * norm_power
    elif estimator_kind == "maclaurin" and config.offset > 0:
        bound = None
    else:
        bound = (3.0**p - 1.0) / config.feature_dim * norm_power

    variance = float(np.var(estimates, ddof=1))
    return EstimateStats(
        trials=trials,
        mean=float(np.mean(estimates)),
        variance=variance,
        std_error=math.sqrt(variance / trials),
        target=polynomial_kernel(x, y, p, config.offset),
        bound=bound,
    )


def run_ams_product_trials(
    x: InputVector,
    y: InputVector,
    degree: int,
    replicas: int,
    trials: int,
    seed: int,
    offset: float = 0.0,
) -> EstimateStats:
    """Bias/variance of the AMS product estimator with an explicit replica count.

    Unlike ``run_trials`` this places no power-of-two constraint on the
    replica count, so the single-replica guarantee (replicas=1) can be
    checked directly: E[Z] = (offset + <x, y>)^p with
    Var(Z) <= (3^p - 1) ||x||^2p ||y||^2p.
    """
    if trials < MIN_TRIALS:
        raise ParameterError(f"need at least {MIN_TRIALS} trials, got {trials}")
    if replicas < 1:
        raise ParameterError(f"need at least 1 replica, got {replicas}")
    ax, ay = augment(x, offset), augment(y, offset)
    estimates = np.empty(trials)
    for lo in range(0, trials, TRIAL_CHUNK):
        hi = min(lo + TRIAL_CHUNK, trials)
        seeds = derive_seeds(seed, np.arange(lo, hi, dtype=np.uint64))
        estimates[lo:hi] = _ams_estimates(ax, ay, replicas, degree, seeds)
    variance = float(np.var(estimates, ddof=1))
    return EstimateStats(
        trials=trials,
        mean=float(np.mean(estimates)),
        variance=variance,
        std_error=math.sqrt(variance / trials),
        target=polynomial_kernel(x, y, degree, offset),
        bound=(3.0**degree - 1.0) * (ax.norm() * ay.norm()) ** (2 * degree),
    )


def run_second_moment_trials(
    x: InputVector, trials: int, seed: int
) -> EstimateStats:
    """Empirical E[Z(x)^2] of the plain AMS sketch: target ||x||^2, bound 2||x||^4."""
    if trials < MIN_TRIALS:
        raise ParameterError(f"need at least {MIN_TRIALS} trials, got {trials}")
    estimates = np.empty(trials)
    for lo in range(0, trials, TRIAL_CHUNK):
        hi = min(lo + TRIAL_CHUNK, trials)
        seeds = derive_seeds(seed, np.arange(lo, hi, dtype=np.uint64))
        coeffs = sample_coefficients_across_seeds(seeds, 0, 4)
        z = _batch_sign_sums(coeffs, x)
        estimates[lo:hi] = z * z
    variance = float(np.var(estimates, ddof=1))
    return EstimateStats(
        trials=trials,
        mean=float(np.mean(estimates)),
        variance=variance,
        std_error=math.sqrt(variance / trials),
        target=x.norm() ** 2,
        bound=2.0 * x.norm() ** 4,
    )


def gram_error(data, config: SketchConfig) -> GramErrorReport:
    """Sketch a dataset under one shared map and compare Gram matrices.

    K_hat[i, j] = <f(x_i), f(x_j)> against K[i, j] = (c + <x_i, x_j>)^p.
    """
    n = len(data)
    if n < 1:
        raise ParameterError("gram_error needs at least one vector")
    if n > GRAM_MAX_VECTORS:
        raise CapacityError(f"{n} vectors exceed the exact-Gram guard of {GRAM_MAX_VECTORS}")
    dense = np.stack([v.to_dense() for v in data])
    if dense.shape[1] != config.input_dim:
        raise DimensionError("dataset dimension must match config.input_dim")
    exact = (config.offset + dense @ dense.T) ** config.degree
    features = build_map(config).apply_batch(data)
    approx = features @ features.T
    diff = approx - exact
    exact_norm = float(np.linalg.norm(exact))
    diff_norm = float(np.linalg.norm(diff))
    if exact_norm == 0.0:
        rel = 0.0 if diff_norm == 0.0 else math.inf
    else:
        rel = diff_norm / exact_norm
    return GramErrorReport(
        n=n,
        feature_dim=config.feature_dim,
        degree=config.degree,
        offset=config.offset,
        seed=config.seed,
        frobenius_rel_error=rel,
        max_abs_entry_error=float(np.abs(diff).max()),
    )


def _random_vectors(rng: np.random.Generator, n: int, dim: int) -> list[InputVector]:
    return [InputVector.from_dense(row) for row in rng.standard_normal((n, dim))]


def timing_profile(
    input_dim: int,
    n_vectors: int,
    degree: int,
    feature_dims,
    seed: int,
    repetitions: int = MIN_TIMING_REPETITIONS,
    offset: float = 0.0,
) -> TimingReport:
    """Median per-vector sketching time across a feature-dimension sweep.

    Measurement is warmed up and repeated; assertions on the result are
    deliberately loose (see ``TimingReport.violations``) because wall clock
    is machine-dependent.  The work itself is data-oblivious.
    """
    if repetitions < MIN_TIMING_REPETITIONS:
        raise ParameterError(f"need at least {MIN_TIMING_REPETITIONS} repetitions")
    dims = sorted(int(d) for d in feature_dims)
    if not dims:
        raise ParameterError("need at least one feature dimension")
    rng = np.random.default_rng(seed)
    data = _random_vectors(rng, n_vectors, input_dim)
    rows = []
    for feature_dim in dims:
        cfg = SketchConfig(input_dim, feature_dim, degree, offset, seed)
        sketch_map = build_map(cfg)
        sketch_map.apply_batch(data)  # warmup
        times = []
        for _ in range(repetitions):
            start = time.perf_counter()
            sketch_map.apply_batch(data)
            times.append((time.perf_counter() - start) / n_vectors)
        rows.append((feature_dim, median(times)))
    return TimingReport(
        input_dim=input_dim, n_vectors=n_vectors, degree=degree, rows=tuple(rows)
    )


def compare_pair_times(
    input_dim: int,
    feature_dim: int,
    degree: int,
    seed: int,
    repetitions: int = MIN_TIMING_REPETITIONS,
) -> tuple[float, float]:
    """Median wall time of one kernel estimate: (sketch map, AMS baseline).

    The sketch map costs O(d + D log D) per pair, the AMS product baseline
    O(p d D); at d = D the baseline should lose by a wide margin.
    """
    rng = np.random.default_rng(seed)
    x, y = _random_vectors(rng, 2, input_dim)
    sketch_map = build_map(SketchConfig(input_dim, feature_dim, degree, 0.0, seed))
    baseline = AmsTensorEstimator(degree, feature_dim, seed)
    sketch_map.estimate_kernel(x, y)  # warmup
    baseline.estimate(x, y)
    tensor_times, ams_times = [], []
    for _ in range(repetitions):
        start = time.perf_counter()
        sketch_map.estimate_kernel(x, y)
        tensor_times.append(time.perf_counter() - start)
        start = time.perf_counter()
        baseline.estimate(x, y)
        ams_times.append(time.perf_counter() - start)
    return median(tensor_times), median(ams_times)


def stats_record(
    mode: str, config: SketchConfig, stats: EstimateStats, passed: bool
) -> dict:
    """JSON-ready record of a bias/variance run (schema shared with the CLI)."""
    return {
        "mode": mode,
        "config": {
            "d": config.input_dim,
            "D": config.feature_dim,
            "p": config.degree,
            "c": config.offset,
            "seed": config.seed,
        },
        "trials": stats.trials,
        "mean": stats.mean,
        "variance": stats.variance,
        "std_error": stats.std_error,
        "target": stats.target,
        "bound": stats.bound,
        "pass": passed,
    }


def gram_record(
    config: SketchConfig, report: GramErrorReport, threshold: float, passed: bool
) -> dict:
    return {
        "mode": "gram-error",
        "config": {
            "d": config.input_dim,
            "D": config.feature_dim,
            "p": config.degree,
            "c": config.offset,
            "seed": config.seed,
        },
        "n": report.n,
        "frobenius_rel_error": report.frobenius_rel_error,
        "max_abs_entry_error": report.max_abs_entry_error,
        "threshold": threshold,
        "pass": passed,
    }


def timing_csv(report: TimingReport) -> str:
    lines = ["feature_dim,seconds_per_vector"]
    for feature_dim, seconds in report.rows:
        lines.append(f"{feature_dim},{seconds:.9e}")
    return "\n".join(lines) + "\n"
