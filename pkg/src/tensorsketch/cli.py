"""Command-line surface.

Two subcommands:

* ``transform`` -- read a dataset, sketch every row, write an n x D feature
  matrix (dense CSV, or the little-endian binary format with ``--binary``).
* ``bench`` -- run the verification harness (bias-variance, gram-error or
  timing mode) and write a machine-readable report.

All randomness flows from ``--seed`` (required: there is no hidden
entropy), so identical invocations produce byte-identical outputs.  Exit
codes: 0 success / all asserted bounds hold, 1 a bound was violated,
2 usage or data error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .baselines import MaclaurinMap
from .errors import TensorSketchError
from .evaluation import (
    compare_pair_times,
    gram_error,
    gram_record,
    run_trials,
    stats_record,
    timing_csv,
    timing_profile,
)
from .feature_map import SketchConfig, build_map
from .data_io import (
    parse_csv_dense,
    parse_libsvm,
    write_matrix_binary,
    write_matrix_csv,
)
from .sketch import InputVector

EXIT_OK = 0
EXIT_BOUND_VIOLATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorsketch",
        description="Polynomial-kernel random feature maps and their verification harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="sketch a dataset into a feature matrix")
    t.add_argument("--input", required=True, help="input dataset path")
    t.add_argument("--format", required=True, choices=("libsvm", "csv"))
    t.add_argument("--output", required=True, help="feature matrix path")
    t.add_argument("--degree", required=True, type=int, help="polynomial degree p")
    t.add_argument("--dim-out", required=True, type=int, help="feature dimension D")
    t.add_argument("--offset", type=float, default=0.0, help="kernel offset c")
    t.add_argument("--seed", required=True, type=int)
    t.add_argument("--estimator", choices=("tensor", "maclaurin"), default="tensor")
    t.add_argument("--dim-in", type=int, default=None, help="force input dimension")
    t.add_argument("--binary", action="store_true", help="write binary instead of CSV")
    t.add_argument(
        "--csv-labels",
        action="store_true",
        help="first CSV column holds labels (csv format only)",
    )

    b = sub.add_parser("bench", help="run the statistical verification harness")
    b.add_argument(
        "--mode", required=True, choices=("bias-variance", "gram-error", "timing")
    )
    b.add_argument("--seed", required=True, type=int)
    b.add_argument("--dim-in", type=int, default=16, help="data dimension d")
    b.add_argument("--dim-out", type=int, default=64, help="feature dimension D")
    b.add_argument("--degree", type=int, default=2, help="polynomial degree p")
    b.add_argument("--offset", type=float, default=0.0, help="kernel offset c")
    b.add_argument("--trials", type=int, default=10000, help="bias-variance trials")
    b.add_argument(
        "--estimator", choices=("tensor", "ams", "maclaurin"), default="tensor"
    )
    b.add_argument("--n-vectors", type=int, default=100)
    b.add_argument(
        "--threshold", type=float, default=0.15, help="gram-error pass threshold"
    )
    b.add_argument(
        "--dims",
        default="256,1024",
        help="comma-separated feature-dimension sweep (timing mode)",
    )
    b.add_argument("--repetitions", type=int, default=5)
    b.add_argument(
        "--compare-baseline",
        action="store_true",
        help="timing mode: also time one kernel estimate against the AMS baseline",
    )
    b.add_argument("--output", default=None, help="report path (default stdout)")
    return parser


def _unit_vectors(seed: int, count: int, dim: int) -> list[InputVector]:
    rng = np.random.default_rng(seed)
    rows = rng.standard_normal((count, dim))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return [InputVector.from_dense(row) for row in rows]


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_transform(args) -> int:
    try:
        with open(args.input) as fh:
            lines = fh.readlines()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        if args.format == "libsvm":
            dataset = parse_libsvm(lines, force_dim=args.dim_in)
        else:
            dataset = parse_csv_dense(lines, labels_in_first_column=args.csv_labels)
            if args.dim_in is not None and dataset.dim != args.dim_in:
                raise TensorSketchError(
                    f"csv rows have {dataset.dim} features, --dim-in says {args.dim_in}"
                )
        if len(dataset) == 0:
            rows = np.empty((0, args.dim_out))
        elif args.estimator == "tensor":
            config = SketchConfig(
                dataset.dim, args.dim_out, args.degree, args.offset, args.seed
            )
            rows = build_map(config).apply_batch(dataset.vectors)
        else:
            mac = MaclaurinMap(
                args.degree,
                args.dim_out,
                args.seed,
                offset=args.offset,
                inhomogeneous=args.offset > 0,
            )
            rows = np.stack([mac.features(v) for v in dataset.vectors])
    except TensorSketchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.binary:
            with open(args.output, "wb") as fh:
                write_matrix_binary(rows, fh)
        else:
            with open(args.output, "w") as fh:
                write_matrix_csv(rows, fh)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        if args.mode == "bias-variance":
            config = SketchConfig(
                args.dim_in, args.dim_out, args.degree, args.offset, args.seed
            )
            x, y = _unit_vectors(args.seed, 2, args.dim_in)
            stats = run_trials(args.estimator, x, y, config, args.trials, args.seed)
            passed = stats.is_unbiased() and stats.variance_ok()
            record = stats_record("bias-variance", config, stats, passed)
            _write_text(args.output, json.dumps(record, indent=2) + "\n")
            if not stats.is_unbiased():
                print(
                    f"violated: |mean - target| = {abs(stats.mean - stats.target):.6g}"
                    f" > 3 * std_error = {3 * stats.std_error:.6g}",
                    file=sys.stderr,
                )
            if not stats.variance_ok():
                print(
                    f"violated: variance = {stats.variance:.6g}"
                    f" > 1.05 * bound = {1.05 * stats.bound:.6g}",
                    file=sys.stderr,
                )
            return EXIT_OK if passed else EXIT_BOUND_VIOLATION

        if args.mode == "gram-error":
            config = SketchConfig(
                args.dim_in, args.dim_out, args.degree, args.offset, args.seed
            )
            data = _unit_vectors(args.seed, args.n_vectors, args.dim_in)
            report = gram_error(data, config)
            passed = report.frobenius_rel_error <= args.threshold
            record = gram_record(config, report, args.threshold, passed)
            _write_text(args.output, json.dumps(record, indent=2) + "\n")
            if not passed:
                print(
                    f"violated: frobenius_rel_error = {report.frobenius_rel_error:.6g}"
                    f" > threshold = {args.threshold:.6g}",
                    file=sys.stderr,
                )
            return EXIT_OK if passed else EXIT_BOUND_VIOLATION

        # timing
        dims = [int(tok) for tok in args.dims.split(",") if tok.strip()]
        report = timing_profile(
            args.dim_in,
            args.n_vectors,
            args.degree,
            dims,
            args.seed,
            repetitions=args.repetitions,
        )
        problems = report.violations()
        text = timing_csv(report)
        if args.compare_baseline:
            tensor_s, ams_s = compare_pair_times(
                args.dim_in, args.dim_out, args.degree, args.seed, args.repetitions
            )
            text += f"# pair seconds: tensor={tensor_s:.9e} ams={ams_s:.9e}\n"
            if tensor_s >= ams_s:
                problems.append(
                    f"tensor pair time {tensor_s:.3e} not below ams {ams_s:.3e}"
                )
        _write_text(args.output, text)
        for problem in problems:
            print(f"violated: {problem}", file=sys.stderr)
        return EXIT_OK if not problems else EXIT_BOUND_VIOLATION
    except TensorSketchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    if args.command == "transform":
        return _cmd_transform(args)
    return _cmd_bench(args)


if __name__ == "__main__":
    sys.exit(main())
