"""Entropy estimators for discrete samples.

The harmonic estimator replaces ``-log p(X_i)`` with ``J(n-1) - J(m_i - 1)``,
where ``m_i`` counts how often the symbol of observation ``i`` occurs, and
averages over the sample.  All estimators are functions of the multiset of
counts only; every sum is a correctly rounded ``math.fsum``, which does not
depend on summation order, so relabelling the symbols cannot change a single
bit of the result.

Alongside the plain functions, :class:`HarmonicEntropy`,
:class:`PluginEntropy` and :class:`MillerMadowEntropy` wrap the same
computations in a scikit-learn style ``fit`` interface.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator

from .distributions import Pmf, SampleDraw
from .special import harmonic
from .validation import check_counts, check_level, check_symbols


@dataclass(frozen=True)
class CountsHistogram:
    """Symbol counts of a sample of size ``n``."""

    counts: Mapping[int, int]
    n: int

    def __post_init__(self):
        for sym, c in self.counts.items():
            if int(sym) < 1:
                raise ValueError(f"symbols are positive integers, got {sym}")
            if int(c) < 1:
                raise ValueError(f"counts are positive, got {c} for symbol {sym}")
        total = sum(int(c) for c in self.counts.values())
        if total != self.n:
            raise ValueError(f"counts sum to {total}, expected n={self.n}")

    @classmethod
    def from_symbols(cls, symbols) -> "CountsHistogram":
        arr = check_symbols(symbols)
        if arr.min() < 1:
            raise ValueError("symbols are positive integers")
        values, counts = np.unique(arr, return_counts=True)
        return cls(dict(zip(values.tolist(), counts.tolist())), int(arr.size))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "CountsHistogram":
        counts = {int(k): int(v) for k, v in counts.items()}
        return cls(counts, sum(counts.values()))

    def count_array(self) -> np.ndarray:
        return np.sort(np.fromiter(self.counts.values(), dtype=np.int64, count=len(self.counts)))

    @property
    def observed_symbols(self) -> int:
        return len(self.counts)


@dataclass
class EstimateReport:
    estimator_name: str
    n: int
    point: float
    variance_hat: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    level: float | None = None
    ci_clamped: bool = False
    units: str = "nats"
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def in_bits(self) -> "EstimateReport":
        if self.units == "bits":
            return self
        ln2 = math.log(2.0)
        scale = lambda v: None if v is None else v / ln2  # noqa: E731
        return EstimateReport(
            estimator_name=self.estimator_name,
            n=self.n,
            point=self.point / ln2,
            variance_hat=None if self.variance_hat is None else self.variance_hat / ln2**2,
            ci_low=scale(self.ci_low),
            ci_high=scale(self.ci_high),
            level=self.level,
            ci_clamped=self.ci_clamped,
            units="bits",
            seed=self.seed,
        )


def _as_counts(hist) -> tuple[np.ndarray, int]:
    if isinstance(hist, CountsHistogram):
        return hist.count_array(), hist.n
    counts = check_counts(hist)
    return counts, int(counts.sum())


def _transformed(counts: np.ndarray, n: int):
    """Per-symbol values ``J(n-1) - J(m-1)``; each applies to ``m`` observations."""
    return harmonic(n - 1) - harmonic(counts - 1), counts


def harmonic_estimate(hist) -> float:
    """Harmonic entropy estimate in nats; needs ``n >= 2``."""
    counts, n = _as_counts(hist)
    if n < 2:
        raise ValueError(f"harmonic estimator needs n >= 2, got n={n}")
    return _harmonic_point(counts, n)


def _harmonic_point(counts: np.ndarray, n: int) -> float:
    # counts already validated; sorted or not, the result is the same
    t, w = _transformed(counts, n)
    est = math.fsum((w * t).tolist()) / n
    return min(max(est, 0.0), harmonic(n - 1))


def variance_estimate(hist) -> float:
    """Population variance of the transformed observations ``J(n-1) - J(m_i - 1)``."""
    counts, n = _as_counts(hist)
    if n < 2:
        raise ValueError(f"variance estimator needs n >= 2, got n={n}")
    t, w = _transformed(counts, n)
    mean = math.fsum((w * t).tolist()) / n
    return math.fsum((w * (t - mean) ** 2).tolist()) / n


def plugin_estimate(hist) -> float:
    """Entropy of the empirical frequencies (maximum likelihood)."""
    counts, n = _as_counts(hist)
    return _plugin_point(counts, n)


def _plugin_point(counts: np.ndarray, n: int) -> float:
    freq = counts / n
    return max(math.fsum((-freq * np.log(freq)).tolist()), 0.0)


def miller_estimate(hist) -> float:
    """Plug-in estimate plus the first-order correction ``(s_obs - 1) / (2n)``."""
    counts, n = _as_counts(hist)
    return _plugin_point(counts, n) + (len(counts) - 1) / (2.0 * n)


def plugin_variance(hist) -> float:
    """Population variance of ``-log(m_i / n)`` over the sample."""
    counts, n = _as_counts(hist)
    nl = -np.log(counts / n)
    w = counts
    mean = math.fsum((w * nl).tolist()) / n
    return math.fsum((w * (nl - mean) ** 2).tolist()) / n


def oracle_estimate(draw: SampleDraw | np.ndarray, pmf: Pmf) -> float:
    """``-(1/n) sum_i log p(X_i)`` using the true mass function."""
    symbols = draw.symbols if isinstance(draw, SampleDraw) else check_symbols(draw)
    values, mult = np.unique(symbols, return_counts=True)
    logp = np.atleast_1d(pmf.log_mass(values))
    if not np.all(np.isfinite(logp)):
        bad = values[~np.isfinite(logp)]
        raise ValueError(f"symbols with zero mass under the model: {bad[:5].tolist()}")
    return -math.fsum((mult * logp).tolist()) / len(symbols)


def wald_ci(point: float, variance_hat: float, n: int, level: float = 0.95):
    """Wald interval ``point +/- z * sqrt(variance_hat / n)``, lower end clamped at 0."""
    level = check_level(level)
    if variance_hat < 0:
        raise ValueError("variance must be nonnegative")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    z = float(stats.norm.ppf(0.5 * (1.0 + level)))
    half = z * math.sqrt(variance_hat / n)
    return max(point - half, 0.0), point + half


ESTIMATORS = {
    "harmonic": (harmonic_estimate, variance_estimate),
    "plugin": (plugin_estimate, plugin_variance),
    "miller": (miller_estimate, plugin_variance),
}


def estimate(hist, estimator: str = "harmonic", level: float = 0.95) -> EstimateReport:
    """Point estimate, variance estimate and Wald interval as one report."""
    try:
        point_fn, var_fn = ESTIMATORS[estimator]
    except KeyError:
        raise ValueError(
            f"unknown estimator {estimator!r}; choose from {sorted(ESTIMATORS)}"
        ) from None
    counts, n = _as_counts(hist)
    if n < 2:
        raise ValueError(f"need a sample of size at least 2, got n={n}")
    point = point_fn(counts)
    var = var_fn(counts)
    z = float(stats.norm.ppf(0.5 * (1.0 + check_level(level))))
    low, high = wald_ci(point, var, n, level)
    return EstimateReport(
        estimator_name=estimator,
        n=n,
        point=point,
        variance_hat=var,
        ci_low=low,
        ci_high=high,
        level=level,
        ci_clamped=bool(point - z * math.sqrt(var / n) < 0.0),
    )


class _EntropyEstimator(BaseEstimator):
    """Shared ``fit`` logic; subclasses set ``_name``."""

    _name = ""

    def __init__(self, level: float = 0.95):
        self.level = level

    def fit(self, X, y=None):
        """Estimate entropy from a 1-d sample of integer symbols."""
        check_level(self.level)
        X = check_symbols(X, min_samples=2)
        _, counts = np.unique(X, return_counts=True)
        return self._fit_counts(counts)

    def fit_counts(self, counts):
        """Estimate entropy from symbol counts (a histogram) instead of raw symbols."""
        check_level(self.level)
        if isinstance(counts, Mapping):
            counts = list(counts.values())
        return self._fit_counts(check_counts(counts, min_total=2))

    def _fit_counts(self, counts):
        report = estimate(counts, self._name, self.level)
        self.entropy_ = report.point
        self.variance_ = report.variance_hat
        self.confidence_interval_ = (report.ci_low, report.ci_high)
        self.n_samples_ = report.n
        self.n_symbols_ = int(len(counts))
        self.report_ = report
        return self

    def _check_fitted(self):
        if not hasattr(self, "entropy_"):
            raise AttributeError(
                f"This {type(self).__name__} instance is not fitted yet; call 'fit' first."
            )

    def score(self, X=None, y=None) -> float:
        """The fitted entropy estimate (nats)."""
        self._check_fitted()
        return self.entropy_


class HarmonicEntropy(_EntropyEstimator):
    """Harmonic-number entropy estimator.

    Parameters
    ----------
    level : float, default=0.95
        Coverage of the Wald interval stored in ``confidence_interval_``.

    Attributes
    ----------
    entropy_ : float
        Entropy estimate in nats.
    variance_ : float
        Sample variance of the transformed observations; ``variance_ / n``
        estimates the variance of ``entropy_``.
    confidence_interval_ : tuple of float
    n_samples_, n_symbols_ : int
    """

    _name = "harmonic"

    def transform(self, X):
        """Map each observation to its local entropy term ``J(n-1) - J(m_i - 1)``.

        Counts are taken within ``X`` itself, so the output averages to the
        estimate for that sample.
        """
        X = check_symbols(X, min_samples=2)
        _, inverse, counts = np.unique(X, return_inverse=True, return_counts=True)
        n = X.size
        return harmonic(n - 1) - harmonic(counts[inverse] - 1)


class PluginEntropy(_EntropyEstimator):
    """Maximum-likelihood (plug-in) entropy estimator."""

    _name = "plugin"


class MillerMadowEntropy(_EntropyEstimator):
    """Plug-in estimator with the ``(s_obs - 1) / (2n)`` bias correction."""

    _name = "miller"
