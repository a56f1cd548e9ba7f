"""Command line interface.

Subcommands: ``estimate``, ``simulate``, ``verify`` and ``bias-curve``.
Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 I/O error.  Payloads go to stdout; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import from_spec
from .estimators import CountsHistogram, estimate
from .oracle import run_identity_grid
from .simulation import ConfigError, SimulationConfig, export_results, run_simulation
from .special import use_table

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

log = logging.getLogger("harmonic_entropy")


class InputError(ValueError):
    pass


def read_symbols(lines) -> CountsHistogram:
    symbols = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            value = int(text)
        except ValueError:
            raise InputError(f"line {lineno}: expected a positive integer, got {text!r}") from None
        if value < 1:
            raise InputError(f"line {lineno}: symbols must be positive, got {value}")
        symbols.append(value)
    if not symbols:
        raise InputError("input is empty")
    return CountsHistogram.from_symbols(np.asarray(symbols, dtype=np.int64))


def read_histogram(lines) -> CountsHistogram:
    counts = {}
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        parts = [p.strip() for p in text.split(",")]
        try:
            if len(parts) != 2:
                raise ValueError
            symbol, count = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"line {lineno}: expected 'symbol,count', got {text!r}") from None
        if symbol < 1 or count < 1:
            raise InputError(f"line {lineno}: symbol and count must be positive")
        if symbol in counts:
            raise InputError(f"line {lineno}: symbol {symbol} listed twice")
        counts[symbol] = count
    if not counts:
        raise InputError("input is empty")
    return CountsHistogram.from_counts(counts)


def cmd_estimate(args) -> int:
    try:
        with open(args.input) as fh:
            lines = fh.readlines()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    try:
        hist = read_histogram(lines) if args.format == "histogram" else read_symbols(lines)
        report = estimate(hist, args.estimator, args.level)
    except ValueError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.bits:
        report = report.in_bits()
    print(json.dumps(report.to_dict()))
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        with open(args.config) as fh:
            raw = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    try:
        data = json.loads(raw)
        if isinstance(data, dict) and os.environ.get("ENTROPY_SEED"):
            seed = int(os.environ["ENTROPY_SEED"])
            log.warning("ENTROPY_SEED=%d overrides base_seed", seed)
            data["base_seed"] = seed
        if args.workers is not None and isinstance(data, dict):
            data["workers"] = args.workers
        config = SimulationConfig.from_dict(data)
        result = run_simulation(config, progress=True)
    except (json.JSONDecodeError, ConfigError) as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: simulation failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out if args.out is not None else config.output_path
    try:
        paths = export_results(result, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_verify(args, table=None) -> int:
    if table is None:
        reports = run_identity_grid(args.grid)
    else:
        with use_table(table):
            reports = run_identity_grid(args.grid)
    failed = 0
    for r in reports:
        row = r.to_dict()
        row["report"] = "identity" if hasattr(r, "identity_name") else "bound"
        if not r.passed:
            failed += 1
            row["failed"] = True
        print(json.dumps(row, sort_keys=True))
    log.info("%d checks, %d failed", len(reports), failed)
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def _parse_dist(text: str) -> dict:
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    return json.loads(text)


def bias_curve_grid(n_min: int, n_max: int, points: int) -> list[int]:
    if n_min < 2 or n_max < n_min or points < 1:
        raise ValueError("need 2 <= n_min <= n_max and points >= 1")
    if points == 1:
        return [n_min]
    grid = np.geomspace(n_min, n_max, points)
    return sorted({int(round(v)) for v in grid})


def cmd_bias_curve(args) -> int:
    try:
        pmf = from_spec(_parse_dist(args.dist))
        grid = bias_curve_grid(args.n_min, args.n_max, args.points)
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "exact_bias", "abs_bias"])
    for n in grid:
        b = pmf.exact_bias(n)
        w.writerow([n, format(b, ".17g"), format(abs(b), ".17g")])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonic-entropy",
        description="Shannon entropy estimation with the harmonic estimator.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate entropy from a data file")
    p.add_argument("--input", required=True, help="data file")
    p.add_argument("--format", choices=("symbols", "histogram"), default="symbols")
    p.add_argument("--estimator", choices=("harmonic", "plugin", "miller"), default="harmonic")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--bits", action="store_true", help="report in bits instead of nats")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="run a Monte Carlo study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (default: output_path in config)")
    p.add_argument("--workers", type=int, help="worker processes (default: config value)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the identity verification grid")
    p.add_argument("--grid", choices=("default", "extended"), default="default")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bias-curve", help="exact bias of the harmonic estimator over n")
    p.add_argument("--dist", required=True, help="distribution JSON (inline or a file path)")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(func=cmd_bias_curve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except BrokenPipeError:
        # reader went away (e.g. `| head`); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
