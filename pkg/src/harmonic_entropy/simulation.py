"""Seeded Monte Carlo harness for comparing entropy estimators.

Every (n, replicate) cell draws its sample from an RNG stream seeded by a
64-bit hash of ``(base_seed, n, replicate)``, and all requested estimators
see that same sample.  Work can be spread over processes; results are
collected in replicate order, so the output does not depend on the number
of workers.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .distributions import Pmf, from_spec, mix_seed
from .estimators import _harmonic_point, _plugin_point, oracle_estimate

log = logging.getLogger(__name__)

ESTIMATOR_NAMES = ("harmonic", "plugin", "miller", "oracle")


class ConfigError(ValueError):
    """Raised for a malformed simulation config."""


@dataclass
class SimulationConfig:
    distribution: dict
    n_grid: list
    replicates: int
    base_seed: int = 0
    estimators: list = field(default_factory=lambda: list(ESTIMATOR_NAMES))
    output_path: str = "results"
    workers: int = 1

    def __post_init__(self):
        try:
            self.pmf = from_spec(self.distribution)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"bad distribution: {exc}") from None
        if not isinstance(self.n_grid, (list, tuple)) or not self.n_grid:
            raise ConfigError("n_grid must be a non-empty list of sample sizes")
        if any(not isinstance(n, int) or isinstance(n, bool) or n < 2 for n in self.n_grid):
            raise ConfigError("n_grid entries must be integers >= 2")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        if not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError("replicates must be a positive integer")
        if not isinstance(self.base_seed, int):
            raise ConfigError("base_seed must be an integer")
        unknown = set(self.estimators) - set(ESTIMATOR_NAMES)
        if unknown:
            raise ConfigError(f"unknown estimators: {sorted(unknown)}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        self.n_grid = list(self.n_grid)
        self.estimators = list(self.estimators)

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        allowed = {"distribution", "n_grid", "replicates", "base_seed", "estimators",
                   "output_path", "workers"}
        extra = set(data) - allowed
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        missing = {"distribution", "n_grid", "replicates"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "SimulationConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "distribution": self.distribution,
            "n_grid": self.n_grid,
            "replicates": self.replicates,
            "base_seed": self.base_seed,
            "estimators": self.estimators,
            "output_path": self.output_path,
            "workers": self.workers,
        }


@dataclass
class CellResult:
    estimator: str
    n: int
    estimates: np.ndarray
    mse: float
    mean_bias: float
    empirical_variance: float


@dataclass
class SimulationResult:
    config: SimulationConfig
    true_entropy: float
    cells: list

    def cell(self, estimator: str, n: int) -> CellResult:
        for c in self.cells:
            if c.estimator == estimator and c.n == n:
                return c
        raise KeyError((estimator, n))


def replicate_seed(base_seed: int, n: int, replicate: int) -> int:
    return mix_seed(base_seed, n, replicate)


def _counts(symbols: np.ndarray) -> np.ndarray:
    top = int(symbols.max())
    if top <= 4 * symbols.size + 1024:
        c = np.bincount(symbols)
        return c[c > 0]
    return np.unique(symbols, return_counts=True)[1]


def _evaluate(pmf: Pmf, estimators, symbols: np.ndarray) -> list:
    counts = _counts(symbols)
    n = symbols.size
    out = []
    for name in estimators:
        if name == "harmonic":
            out.append(_harmonic_point(counts, n))
        elif name == "plugin":
            out.append(_plugin_point(counts, n))
        elif name == "miller":
            out.append(_plugin_point(counts, n) + (len(counts) - 1) / (2.0 * n))
        else:
            out.append(oracle_estimate(symbols, pmf))
    return out


def _run_chunk(task) -> np.ndarray:
    spec, estimators, base_seed, n, start, stop = task
    pmf = from_spec(spec)
    rows = np.empty((stop - start, len(estimators)))
    for i, r in enumerate(range(start, stop)):
        draw = pmf.sample(n, replicate_seed(base_seed, n, r))
        rows[i] = _evaluate(pmf, estimators, draw.symbols)
    return rows


def _chunks(replicates: int, workers: int):
    size = max(1, math.ceil(replicates / (4 * workers)))
    return [(s, min(s + size, replicates)) for s in range(0, replicates, size)]


def aggregate(estimates: np.ndarray, truth: float) -> tuple[float, float, float]:
    """(mse, mean bias, population variance); mse = bias^2 + variance up to rounding."""
    est = np.asarray(estimates, dtype=float)
    mean = math.fsum(est.tolist()) / est.size
    err = est - truth
    mse = math.fsum((err * err).tolist()) / est.size
    var = math.fsum(((est - mean) ** 2).tolist()) / est.size
    return mse, mean - truth, var


def run_simulation(config: SimulationConfig, progress: bool = False) -> SimulationResult:
    pmf = config.pmf
    spec = pmf.to_spec()
    truth = pmf.entropy()
    estimators = config.estimators
    per_n = {}
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 and estimators else None
    try:
        for n in config.n_grid:
            if not estimators:
                per_n[n] = np.empty((config.replicates, 0))
                continue
            tasks = [(spec, estimators, config.base_seed, n, a, b)
                     for a, b in _chunks(config.replicates, config.workers)]
            parts = list(pool.map(_run_chunk, tasks)) if pool else [_run_chunk(t) for t in tasks]
            per_n[n] = np.vstack(parts)
            if progress:
                log.info("n=%d done (%d replicates)", n, config.replicates)
    finally:
        if pool is not None:
            pool.shutdown()
    cells = []
    for e, name in enumerate(estimators):
        for n in config.n_grid:
            est = per_n[n][:, e].copy()
            mse, bias, var = aggregate(est, truth)
            cells.append(CellResult(name, n, est, mse, bias, var))
    return SimulationResult(config=config, true_entropy=truth, cells=cells)


def rate_slope(points) -> float:
    """Least-squares slope of ``log(value)`` against ``log(n)``."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least three (n, value) points")
    if np.any(pts[:, 1] <= 0) or np.any(pts[:, 0] <= 0):
        raise ValueError("rate_slope needs positive n and values")
    x = np.log(pts[:, 0])
    y = np.log(pts[:, 1])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass
class NormalityResult:
    ks_statistic: float
    p_value: float
    standardized: np.ndarray


def normality_check(values) -> NormalityResult:
    """One-sample KS test of the standardized values against N(0, 1)."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 50:
        raise ValueError(f"normality check needs at least 50 values, got {v.size}")
    sd = np.std(v, ddof=1)
    if not sd > 0:
        raise ValueError("values have zero variance")
    z = (v - v.mean()) / sd
    res = stats.kstest(z, "norm")
    return NormalityResult(float(res.statistic), float(res.pvalue), z)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


DETAIL_HEADER = ["estimator", "n", "replicate", "estimate", "true_entropy"]
AGGREGATE_HEADER = ["estimator", "n", "mse", "mean_bias", "variance"]


def export_results(result: SimulationResult, out_dir, formats=("csv", "json")) -> list[Path]:
    """Write ``detail.csv``, ``aggregate.csv`` and/or ``results.json`` into ``out_dir``."""
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        truth = result.true_entropy
        if "csv" in formats:
            detail = out / "detail.csv"
            with open(detail, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(DETAIL_HEADER)
                for c in result.cells:
                    for r, v in enumerate(c.estimates):
                        w.writerow([c.estimator, c.n, r, _fmt(v), _fmt(truth)])
            agg = out / "aggregate.csv"
            with open(agg, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(AGGREGATE_HEADER)
                for c in result.cells:
                    w.writerow([c.estimator, c.n, _fmt(c.mse), _fmt(c.mean_bias),
                                _fmt(c.empirical_variance)])
            written += [detail, agg]
        if "json" in formats:
            path = out / "results.json"
            payload = {
                "config": result.config.to_dict(),
                "true_entropy": truth,
                "declared_alpha": result.config.pmf.declared_alpha,
                "detail": [
                    {"estimator": c.estimator, "n": c.n, "replicate": r,
                     "estimate": float(v), "true_entropy": truth}
                    for c in result.cells for r, v in enumerate(c.estimates)
                ],
                "aggregate": [
                    {"estimator": c.estimator, "n": c.n, "mse": c.mse,
                     "mean_bias": c.mean_bias, "variance": c.empirical_variance}
                    for c in result.cells
                ],
            }
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=1)
                fh.write("\n")
            written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write results to {out}: {exc.strerror or exc}") from exc
    return written

