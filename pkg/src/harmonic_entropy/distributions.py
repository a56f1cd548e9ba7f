"""Discrete distributions on the positive integers.

Three families are supported: an explicit finite probability vector, the
geometric distribution ``p (1-p)^(j-1)`` and the zeta (discrete power law)
distribution ``j^(-gamma) / zeta(gamma)``.  Each exposes its mass function,
exact entropy, the variance of ``log p(X)``, the tail moments
``sum_j p_j^m (1 - p_j)^k`` and the exact bias of the harmonic estimator.

Series over infinite supports are split into an explicit head and a tail.
Geometric tails are dropped once a closed-form bound is negligible; zeta tails
are summed analytically through Hurwitz zeta values, so no truncation error is
left behind.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import special as sp

from .special import complement_log_tail, harmonic

# Target accuracies for deterministic series.
BOUND_TOL = 1e-12
VALUE_TOL = 1e-10
RENORMALIZE_TOL = 1e-9
# Zeta tails are expanded in powers of p once n * p_j drops below this.
_ZETA_SWITCH = 0.05


@dataclass(frozen=True)
class SampleDraw:
    symbols: np.ndarray
    n: int
    seed: int

    def __post_init__(self):
        if len(self.symbols) != self.n:
            raise ValueError("symbols length does not match n")


_MASK64 = 0xFFFFFFFFFFFFFFFF


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(*parts: int) -> int:
    """Hash integers into one 64-bit seed (chained splitmix64).

    Distinct tuples map to unrelated seeds, so each (base seed, n, replicate)
    cell gets its own stream and reshaping a grid never reuses one.
    """
    h = 0x6A09E667F3BCC908
    for part in parts:
        h = _splitmix64(h ^ (int(part) & _MASK64))
    return h


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


class Pmf:
    """Base class for the supported families; instances are immutable."""

    family: str = ""
    declared_alpha: float = 0.0

    def mass(self, j):
        raise NotImplementedError

    def log_mass(self, j):
        raise NotImplementedError

    def entropy(self) -> float:
        raise NotImplementedError

    def var_log_p(self) -> float:
        raise NotImplementedError

    def tail_moment(self, m: int, k: int) -> float:
        raise NotImplementedError

    def exact_bias(self, n: int) -> float:
        raise NotImplementedError

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    def sample(self, n: int, seed: int) -> SampleDraw:
        n = int(n)
        if n < 1:
            raise ValueError(f"sample size must be positive, got {n}")
        symbols = self._draw(_rng(seed), n)
        return SampleDraw(symbols=symbols, n=n, seed=int(seed) & _MASK64)


def _check_index(j):
    arr = np.asarray(j)
    if arr.size and np.min(arr) < 1:
        raise ValueError("symbols are positive integers")
    return arr


def _bias_terms(probs: np.ndarray, n: int) -> float:
    # sum_j p_j * sum_{k>=n} (1-p_j)^k / k, grouped over equal masses.
    values, mult = np.unique(probs, return_counts=True)
    return math.fsum(
        c * p * complement_log_tail(p, n) for p, c in zip(values.tolist(), mult.tolist())
    )


@dataclass(frozen=True)
class Finite(Pmf):
    """Explicit probability vector, stored sorted in descending order."""

    probs: tuple
    family: str = field(default="finite", init=False)
    declared_alpha: float = field(default=0.0, init=False)

    def __init__(self, probs):
        arr = np.asarray(probs, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("finite pmf needs at least one probability")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValueError("finite pmf probabilities must be positive and finite")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > RENORMALIZE_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        arr = np.sort(arr / total)[::-1]
        object.__setattr__(self, "probs", tuple(arr.tolist()))

    @classmethod
    def uniform(cls, size: int) -> "Finite":
        return cls(np.full(int(size), 1.0 / int(size)))

    @property
    def support_size(self) -> int:
        return len(self.probs)

    @property
    def _arr(self) -> np.ndarray:
        return np.asarray(self.probs)

    def mass(self, j):
        arr = _check_index(j)
        probs = np.concatenate([[0.0], self._arr])
        idx = np.where(arr <= len(self.probs), arr, 0)
        out = probs[idx]
        return float(out) if out.ndim == 0 else out

    def log_mass(self, j):
        with np.errstate(divide="ignore"):
            return np.log(self.mass(j))

    def entropy(self) -> float:
        p = self._arr
        return math.fsum((-p * np.log(p)).tolist())

    def var_log_p(self) -> float:
        p = self._arr
        h = self.entropy()
        return max(math.fsum((p * (np.log(p) + h) ** 2).tolist()), 0.0)

    def tail_moment(self, m: int, k: int) -> float:
        p = self._arr
        return math.fsum((p**m * np.exp(k * np.log1p(-np.minimum(p, 1.0)))).tolist())

    def exact_bias(self, n: int) -> float:
        if n < 2:
            raise ValueError(f"bias needs n >= 2, got {n}")
        return -_bias_terms(self._arr, n)

    @functools.cached_property
    def _cdf(self) -> np.ndarray:
        return np.cumsum(self._arr)

    def _draw(self, rng, n):
        cdf = self._cdf
        u = rng.random(n) * cdf[-1]
        return np.searchsorted(cdf, u, side="right").astype(np.int64) + 1

    def to_spec(self) -> dict:
        return {"family": "finite", "probs": list(self.probs)}


@dataclass(frozen=True)
class Geometric(Pmf):
    """``P(X = j) = p (1 - p)^(j - 1)`` for ``j >= 1``."""

    p: float
    family: str = field(default="geometric", init=False)
    declared_alpha: float = field(default=0.0, init=False)

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"geometric parameter must lie in (0, 1), got {self.p}")

    def mass(self, j):
        arr = _check_index(j)
        out = self.p * np.exp((arr - 1) * math.log1p(-self.p))
        return float(out) if np.ndim(out) == 0 else out

    def log_mass(self, j):
        arr = _check_index(j)
        out = math.log(self.p) + (arr - 1) * math.log1p(-self.p)
        return float(out) if np.ndim(out) == 0 else out

    def entropy(self) -> float:
        p = self.p
        return (-(1 - p) * math.log1p(-p) - p * math.log(p)) / p

    def var_log_p(self) -> float:
        p = self.p
        return math.log1p(-p) ** 2 * (1 - p) / p**2

    def head_length(self, tol: float = 1e-17) -> int:
        """Smallest J with sum_{j>J} p_j (-log p_j) below ``tol``."""
        p = self.p
        q = 1.0 - p
        lq = -math.log1p(-p)
        j = 1
        while True:
            tail_mass = q**j
            # sum_{i>j} p_i (-log p_i) in closed form
            bound = tail_mass * (-math.log(p) + lq * (j + q / p))
            if bound < tol:
                return j
            j += 1

    def head(self, tol: float = 1e-17) -> np.ndarray:
        return self.mass(np.arange(1, self.head_length(tol) + 1))

    def tail_moment(self, m: int, k: int) -> float:
        probs = self.head(BOUND_TOL * 1e-3)
        return math.fsum((probs**m * np.exp(k * np.log1p(-probs))).tolist())

    def exact_bias(self, n: int) -> float:
        if n < 2:
            raise ValueError(f"bias needs n >= 2, got {n}")
        return -_bias_terms(self.head(), n)

    def _draw(self, rng, n):
        # Inverse CDF: P(X > j) = (1-p)^j.
        u = 1.0 - rng.random(n)
        x = np.ceil(np.log(u) / math.log1p(-self.p))
        return np.maximum(x, 1).astype(np.int64)

    def to_spec(self) -> dict:
        return {"family": "geometric", "p": self.p}


@dataclass(frozen=True)
class Zeta(Pmf):
    """Discrete power law ``P(X = j) = j^(-gamma) / zeta(gamma)``."""

    gamma: float
    family: str = field(default="zeta", init=False)

    def __post_init__(self):
        if not self.gamma > 1.0 or not math.isfinite(self.gamma):
            raise ValueError(f"zeta exponent must exceed 1, got {self.gamma}")

    @property
    def declared_alpha(self) -> float:
        return 1.0 / self.gamma

    @property
    def normalizer(self) -> float:
        return float(sp.zeta(self.gamma, 1))

    def mass(self, j):
        arr = _check_index(j).astype(float)
        out = arr ** (-self.gamma) / self.normalizer
        return float(out) if np.ndim(out) == 0 else out

    def log_mass(self, j):
        arr = _check_index(j).astype(float)
        out = -self.gamma * np.log(arr) - math.log(self.normalizer)
        return float(out) if np.ndim(out) == 0 else out

    # Tail sums over j > J, all exact up to floating point.
    def _tail_power(self, a: float, J: int) -> float:
        """sum_{j>J} p_j^a."""
        return float(sp.zeta(a * self.gamma, J + 1)) / self.normalizer**a

    def _tail_log(self, J: int, order: int) -> float:
        """sum_{j>J} j^(-gamma) (log j)^order."""
        if order == 0:
            return float(sp.zeta(self.gamma, J + 1))
        val = mpmath.zeta(self.gamma, J + 1, order)
        return float((-1) ** order * val)

    def _log_moments(self, J: int = 1000) -> tuple[float, float]:
        # E[-log p] and E[(log p)^2], head summed directly and tail analytically.
        j = np.arange(1, J + 1, dtype=float)
        p = self.mass(j)
        lp = self.log_mass(j)
        logz = math.log(self.normalizer)
        t0 = self._tail_log(J, 0)
        t1 = self._tail_log(J, 1)
        t2 = self._tail_log(J, 2)
        g = self.gamma
        z = self.normalizer
        first = math.fsum((-p * lp).tolist()) + (g * t1 + logz * t0) / z
        second = (
            math.fsum((p * lp * lp).tolist())
            + (g * g * t2 + 2 * g * logz * t1 + logz * logz * t0) / z
        )
        return first, second

    def entropy(self) -> float:
        return self._log_moments()[0]

    def var_log_p(self) -> float:
        h, second = self._log_moments()
        return max(second - h * h, 0.0)

    def _switch_index(self, scale: int) -> int:
        # first J with scale * p_J <= _ZETA_SWITCH
        z = self.normalizer
        J = math.ceil((scale / (_ZETA_SWITCH * z)) ** (1.0 / self.gamma))
        return max(J, 1)

    def tail_moment(self, m: int, k: int) -> float:
        m = int(m)
        k = int(k)
        J = self._switch_index(k)
        j = np.arange(1, J + 1, dtype=float)
        p = self.mass(j)
        head = math.fsum((p**m * np.exp(k * np.log1p(-p))).tolist())
        # (1-p)^k = sum_r C(k, r) (-p)^r on the tail, where k p < _ZETA_SWITCH.
        terms = _binomial_tail_terms(self, m, k, J, lambda r, c: (-1) ** r * c)
        return head + math.fsum(terms)

    def exact_bias(self, n: int) -> float:
        n = int(n)
        if n < 2:
            raise ValueError(f"bias needs n >= 2, got {n}")
        J = self._switch_index(n)
        head = _bias_terms(self.mass(np.arange(1, J + 1, dtype=float)), n)
        # For small p: sum_{k>=n}(1-p)^k/k = -log p - J(n-1) - sum_r (-p)^r C(n-1,r)/r.
        z = self.normalizer
        g = self.gamma
        neg_plogp = (g * self._tail_log(J, 1) + math.log(z) * self._tail_log(J, 0)) / z
        terms = [neg_plogp, -harmonic(n - 1) * self._tail_power(1, J)]
        terms += _binomial_tail_terms(
            self, 1, n - 1, J, lambda r, c: 0.0 if r == 0 else (-1) ** (r + 1) * c / r
        )
        return -(head + math.fsum(terms))

    def _draw(self, rng, n):
        # Devroye's rejection sampler for the zeta law; exact, no truncation.
        a = self.gamma
        b = 2.0 ** (a - 1.0)
        out = np.empty(n, dtype=np.int64)
        filled = 0
        limit = float(np.iinfo(np.int64).max)
        while filled < n:
            need = n - filled
            batch = max(int(need * 1.5) + 16, 64)
            u = 1.0 - rng.random(batch)
            v = rng.random(batch)
            x = np.floor(u ** (-1.0 / (a - 1.0)))
            if np.any(x >= limit):
                raise OverflowError(
                    "zeta draw exceeded the int64 range; use a larger exponent"
                )
            t = (1.0 + 1.0 / x) ** (a - 1.0)
            accept = v * x * (t - 1.0) / (b - 1.0) <= t / b
            got = x[accept][:need].astype(np.int64)
            out[filled : filled + len(got)] = got
            filled += len(got)
        return out

    def to_spec(self) -> dict:
        return {"family": "zeta", "gamma": self.gamma}


def _binomial_tail_terms(pmf: "Zeta", m: int, k: int, J: int, weight) -> list:
    """Terms ``weight(r, C(k, r)) * sum_{j>J} p_j^(m+r)`` for r = 0, 1, ...

    Stops once ``(k p_{J+1})^r / r!`` times the leading tail sum is negligible;
    that quantity bounds every remaining term.
    """
    base = pmf._tail_power(m, J)
    x = k * pmf.mass(J + 1)
    terms = []
    coef = 1.0
    bound = base
    for r in range(k + 1):
        w = weight(r, coef)
        if w:
            terms.append(w * pmf._tail_power(m + r, J))
        bound *= x / (r + 1)
        if bound < 1e-18 * max(base, 1e-300):
            break
        coef = coef * (k - r) / (r + 1)
    return terms


def from_spec(spec: dict) -> Pmf:
    """Build a distribution from its JSON form, e.g. ``{"family": "zeta", "gamma": 2}``."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ValueError("distribution spec must be an object with a 'family' key")
    family = str(spec["family"]).lower()
    if family == "finite":
        if "probs" not in spec:
            raise ValueError("finite distribution needs 'probs'")
        return Finite(spec["probs"])
    if family == "uniform":
        return Finite.uniform(int(spec["size"]))
    if family == "geometric":
        return Geometric(float(spec["p"]))
    if family == "zeta":
        return Zeta(float(spec["gamma"]))
    raise ValueError(f"unknown distribution family {spec['family']!r}")


# Function forms of the Pmf methods.

def mass(pmf: Pmf, j):
    return pmf.mass(j)


def entropy(pmf: Pmf) -> float:
    return pmf.entropy()


def sample(pmf: Pmf, n: int, seed: int) -> SampleDraw:
    return pmf.sample(n, seed)


def tail_moment(pmf: Pmf, m: int, k: int) -> float:
    if m < 1 or k < 1:
        raise ValueError("tail_moment needs m >= 1 and k >= 1")
    return pmf.tail_moment(m, k)


def exact_bias(pmf: Pmf, n: int) -> float:
    """Exact bias ``E[H_hat] - H`` of the harmonic estimator at sample size ``n``."""
    return pmf.exact_bias(n)


def var_log_p(pmf: Pmf) -> float:
    return pmf.var_log_p()
