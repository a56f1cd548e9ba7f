"""Harmonic numbers, logarithm tail series and the dilogarithm.

``J(m) = 1 + 1/2 + ... + 1/m`` (with ``J(0) = 0``) is served from a prefix
table built with compensated summation; arguments beyond the table use the
asymptotic expansion ``log m + gamma + 1/(2m) - 1/(12m^2) + 1/(120m^4)``.
"""
from __future__ import annotations

import contextlib
import math
from typing import Iterator

import numpy as np

EULER_GAMMA = 0.57721566490153286061
ZETA2 = math.pi**2 / 6.0

DEFAULT_CAPACITY = 1 << 20


class HarmonicTable:
    """Prefix table ``values[m] = J(m)`` for ``0 <= m <= capacity``."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        self.capacity = int(capacity)
        values = np.empty(self.capacity + 1)
        values[0] = 0.0
        # Kahan summation keeps the cumulative error at a few ulps.
        total = 0.0
        comp = 0.0
        for k in range(1, self.capacity + 1):
            y = 1.0 / k - comp
            t = total + y
            comp = (t - total) - y
            total = t
            values[k] = total
        values.setflags(write=False)
        self.values = values

    @classmethod
    def from_values(cls, values) -> "HarmonicTable":
        """Wrap precomputed values without validation (used for fault injection)."""
        table = cls.__new__(cls)
        arr = np.array(values, dtype=float)
        arr.setflags(write=False)
        table.values = arr
        table.capacity = len(arr) - 1
        return table

    def perturbed(self, index: int, delta: float) -> "HarmonicTable":
        """Copy of this table with ``values[index]`` shifted by ``delta``."""
        values = np.array(self.values)
        values[index] += delta
        return HarmonicTable.from_values(values)

    def __call__(self, m):
        return _evaluate(self, m)

    def __len__(self) -> int:
        return self.capacity + 1


_default_table: HarmonicTable | None = None
_active_table: HarmonicTable | None = None


def default_table() -> HarmonicTable:
    global _default_table
    if _default_table is None:
        _default_table = HarmonicTable()
    return _default_table


def active_table() -> HarmonicTable:
    return _active_table if _active_table is not None else default_table()


@contextlib.contextmanager
def use_table(table: HarmonicTable) -> Iterator[HarmonicTable]:
    """Temporarily route every ``harmonic`` call through ``table``."""
    global _active_table
    previous = _active_table
    _active_table = table
    try:
        yield table
    finally:
        _active_table = previous


def harmonic_asymptotic(m):
    """Four-term asymptotic expansion of ``J(m)``; accurate for large ``m``."""
    m = np.asarray(m, dtype=float)
    inv = 1.0 / m
    inv2 = inv * inv
    out = np.log(m) + EULER_GAMMA + 0.5 * inv - inv2 / 12.0 + inv2 * inv2 / 120.0
    return out if out.ndim else float(out)


def _evaluate(table: HarmonicTable, m):
    arr = np.asarray(m)
    if arr.ndim == 0:
        mi = int(arr)
        if mi < 0:
            raise ValueError(f"harmonic number needs m >= 0, got {mi}")
        if mi <= table.capacity:
            return float(table.values[mi])
        return harmonic_asymptotic(mi)
    arr = arr.astype(np.int64, copy=False)
    if arr.size and arr.min() < 0:
        raise ValueError("harmonic number needs m >= 0")
    big = arr > table.capacity
    if not big.any():
        return table.values[arr]
    out = np.empty(arr.shape)
    out[~big] = table.values[arr[~big]]
    out[big] = harmonic_asymptotic(arr[big])
    return out


def harmonic(m):
    """Harmonic number ``J(m)``; accepts an int or an integer array."""
    return _evaluate(active_table(), m)


def _log_tail_direct(log_x: float, n: int) -> float:
    # sum_{k>=n} x^k / k in numpy chunks; all terms are positive and the
    # ratio of successive terms is < x, so the remainder after a chunk is
    # at most last_term * x / (1 - x).
    ratio_bound = math.exp(log_x) / -math.expm1(log_x)
    chunk = 4096
    parts = []
    total = 0.0
    start = n
    while True:
        k = np.arange(start, start + chunk, dtype=float)
        terms = np.exp(k * log_x) / k
        parts.append(float(terms.sum()))
        total = math.fsum(parts)
        last = terms[-1]
        if last == 0.0 or last * ratio_bound <= 1e-18 * total:
            return total
        start += chunk
        chunk = min(chunk * 2, 1 << 20)


def complement_log_tail(p: float, n: int) -> float:
    """``sum_{k>=n} (1-p)^k / k`` for ``0 < p <= 1``, accurate for tiny ``p``.

    Working from ``p`` rather than ``1 - p`` keeps ``log p`` and the powers
    ``(1-p)^k = exp(k log1p(-p))`` at full relative precision.
    """
    p = float(p)
    n = int(n)
    if not 0.0 < p <= 1.0:
        raise ValueError(f"need 0 < p <= 1, got {p}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if p == 1.0:
        return 0.0
    log_x = math.log1p(-p)
    if n == 1:
        return -math.log(p)
    # Direct summation needs roughly 40/p terms; the closed form needs n.
    if 40.0 / p < n or n * log_x < math.log(1e-3):
        return _log_tail_direct(log_x, n)
    # sum_{k<n} x^k/k = J(n-1) + sum_{k<n} expm1(k log x)/k; the second sum
    # has terms of one sign, so a pairwise sum loses nothing to cancellation.
    big_n = n - 1
    if -log_x * big_n <= 1e-3:
        # expm1(k l)/k = sum_r l^r k^(r-1)/r!, with exact power sums in k
        s1 = big_n * (big_n + 1) / 2.0
        power_sums = (big_n, s1, s1 * (2 * big_n + 1) / 3.0, s1 * s1)
        corr = math.fsum(log_x**r / math.factorial(r) * power_sums[r - 1] for r in range(1, 5))
    else:
        k = np.arange(1, n, dtype=float)
        corr = float(np.sum(np.expm1(k * log_x) / k))
    return max(-math.log(p) - harmonic(big_n) - corr, 0.0)


def log_tail_series(x: float, n: int) -> float:
    """``sum_{k>=n} x^k / k`` for ``0 <= x < 1`` and ``n >= 1``.

    Evaluated as ``-log(1 - x) - sum_{k<n} x^k / k`` when that is the shorter
    computation, otherwise by summing the tail directly (which is also the
    accurate route once the tail is small compared with ``-log(1 - x)``).
    """
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise ValueError(f"log_tail_series needs 0 <= x < 1, got {x}")
    if int(n) < 1:
        raise ValueError(f"log_tail_series needs n >= 1, got {n}")
    if x == 0.0:
        return 0.0
    return complement_log_tail(1.0 - x, n)


def dilog(x: float) -> float:
    """Real dilogarithm ``Li2(x) = sum_m x^m / m^2`` on ``[0, 1]``."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"dilog is defined here only on [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return ZETA2
    if x > 0.5:
        # Li2(x) + Li2(1-x) = zeta(2) - log(x) log(1-x)
        return ZETA2 - math.log(x) * math.log1p(-x) - _dilog_series(1.0 - x)
    return _dilog_series(x)


def _dilog_series(x: float) -> float:
    terms = []
    power = x
    m = 1
    while power > 1e-18:
        terms.append(power / (m * m))
        m += 1
        power *= x
    return math.fsum(terms)
