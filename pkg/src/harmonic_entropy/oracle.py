"""Exact enumeration oracles for harmonic-number moment identities.

Each ``verify_*`` function evaluates one identity twice: the left side by
brute-force enumeration of the binomial or multinomial outcome space, the
right side from the closed-form sums.  The result is an
:class:`IdentityReport`.  These are checks on concrete parameter values,
meant for small ``n``; they are not production code paths.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .distributions import Finite, Pmf
from .estimators import harmonic_estimate
from .special import ZETA2, dilog, harmonic

BINOMIAL_MAX_N = 60
MULTINOMIAL_MAX_N = 30
CLOSED_FORM_MAX_N = 40
EXACT_TOL = 1e-10
SERIES_TOL = 1e-8
MAX_COMPOSITIONS = 10**7


@dataclass
class IdentityReport:
    identity_name: str
    parameters: dict
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    passed: bool
    extra: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, name, parameters, lhs, rhs, tolerance, **extra) -> "IdentityReport":
        gap = abs(lhs - rhs)
        return cls(name, dict(parameters), float(lhs), float(rhs), gap, tolerance,
                   bool(gap <= tolerance), extra)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


@dataclass
class BoundReport:
    """A one-sided check ``value <= bound`` (or ``>=`` when ``direction`` is "ge")."""

    check_name: str
    parameters: dict
    value: float
    bound: float
    direction: str
    passed: bool

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


def _binomial_weights(n: int, p: float) -> np.ndarray:
    # C(n, m) p^m (1-p)^(n-m) for m = 0..n, built in log space.
    m = np.arange(n + 1)
    out = np.zeros(n + 1)
    if p == 1.0:
        out[n] = 1.0
        return out
    logc = math.lgamma(n + 1) - np.array([math.lgamma(k + 1) + math.lgamma(n - k + 1) for k in m])
    return np.exp(logc + m * math.log(p) + (n - m) * math.log1p(-p))


def _check_binomial(n: int, p: float, max_n: int = BINOMIAL_MAX_N):
    if not 1 <= n <= max_n:
        raise ValueError(f"n must lie in [1, {max_n}] for enumeration, got {n}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")


def binom_expect_J(n: int, p: float) -> float:
    """``E[J(M)]`` for ``M ~ Binomial(n, p)`` by summing over every outcome."""
    _check_binomial(n, p)
    w = _binomial_weights(n, p)
    return math.fsum((w * harmonic(np.arange(n + 1))).tolist())


def _partial_log_series(x: float, n: int) -> float:
    return math.fsum(x**m / m for m in range(1, n + 1))


def verify_prop_mathind(n: int, p: float) -> IdentityReport:
    """``E[J(n) - J(M)] = sum_{m=1}^n (1-p)^m / m`` for ``M ~ Binomial(n, p)``."""
    _check_binomial(n, p)
    lhs = harmonic(n) - binom_expect_J(n, p)
    rhs = _partial_log_series(1.0 - p, n)
    return IdentityReport.compare("first_moment", {"n": n, "p": p}, lhs, rhs, EXACT_TOL)


def second_moment_sums(n: int, p: float) -> float:
    x = 1.0 - p
    terms = [x**m / (k * (m - k)) for m in range(2, n + 1) for k in range(1, m)]
    terms += [x**m / (m * k) for m in range(1, n + 1) for k in range(n - m + 1, n + 1)]
    return math.fsum(terms)


def verify_second_moment(n: int, p: float) -> IdentityReport:
    """``E[(J(n) - J(M))^2]`` against its double-sum form."""
    _check_binomial(n, p)
    w = _binomial_weights(n, p)
    d = harmonic(n) - harmonic(np.arange(n + 1))
    lhs = math.fsum((w * d * d).tolist())
    return IdentityReport.compare(
        "second_moment", {"n": n, "p": p}, lhs, second_moment_sums(n, p), EXACT_TOL
    )


def _relative_tol(terms) -> float:
    # scaled by the absolute term mass, which bounds rounding error in signed sums
    return EXACT_TOL * max(1.0, math.fsum(abs(t) for t in terms))


def verify_harmonic_binomial(n: int, p: float, q: float) -> IdentityReport:
    """``sum_k J(k) C(n,k) p^k q^(n-k) = sum_k [(p+q)^n - q^k (p+q)^(n-k)] / k`` for real p, q."""
    if not 1 <= n <= CLOSED_FORM_MAX_N:
        raise ValueError(f"n must lie in [1, {CLOSED_FORM_MAX_N}], got {n}")
    terms = [harmonic(k) * math.comb(n, k) * p**k * q ** (n - k) for k in range(n + 1)]
    lhs = math.fsum(terms)
    s = p + q
    rhs = math.fsum((s**n - q**k * s ** (n - k)) / k for k in range(1, n + 1))
    return IdentityReport.compare(
        "harmonic_binomial", {"n": n, "p": p, "q": q}, lhs, rhs, _relative_tol(terms)
    )


def verify_reciprocal_binomial(n: int, p: float, q: float) -> IdentityReport:
    """``sum_k C(n,k) p^k q^(n-k) / k = sum_k [(p+q)^k q^(n-k) - q^n] / k`` for real p, q."""
    if not 1 <= n <= CLOSED_FORM_MAX_N:
        raise ValueError(f"n must lie in [1, {CLOSED_FORM_MAX_N}], got {n}")
    terms = [math.comb(n, k) * p**k * q ** (n - k) / k for k in range(1, n + 1)]
    lhs = math.fsum(terms)
    s = p + q
    rhs = math.fsum((s**k * q ** (n - k) - q**n) / k for k in range(1, n + 1))
    return IdentityReport.compare(
        "reciprocal_binomial", {"n": n, "p": p, "q": q}, lhs, rhs, _relative_tol(terms)
    )


def multinomial_product_sums(n: int, p: float, q: float) -> float:
    a = 1.0 - q / (1.0 - p)
    b = 1.0 - p / (1.0 - q)
    terms = [
        ((1 - q) ** m * b**k + (1 - p) ** m * a**k) / (m * k)
        for m in range(1, n + 1)
        for k in range(1, m + 1)
    ]
    terms += [(1 - (1 - p) ** m - (1 - q) ** m) / m**2 for m in range(1, n + 1)]
    return math.fsum(terms)


def verify_multinomial_product(n: int, p: float, q: float) -> IdentityReport:
    """``E[(J(n) - J(M)) (J(n) - J(K))]`` for ``(M, K, rest) ~ Multinomial(n; p, q, 1-p-q)``.

    The report's ``extra`` carries the exact covariance of the two
    transformed counts.
    """
    if not 1 <= n <= MULTINOMIAL_MAX_N:
        raise ValueError(f"n must lie in [1, {MULTINOMIAL_MAX_N}], got {n}")
    if not (p > 0 and q > 0):
        raise ValueError("p and q must be positive")
    if p + q > 1.0 + 1e-15:
        raise ValueError(f"p + q must not exceed 1, got {p + q}")
    r = max(1.0 - p - q, 0.0)
    jn = harmonic(n)
    lgn = math.lgamma(n + 1)
    terms = []
    for m in range(n + 1):
        dm = jn - harmonic(m)
        for k in range(n - m + 1):
            rest = n - m - k
            if r == 0.0 and rest > 0:
                continue
            logw = (
                lgn - math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(rest + 1)
                + m * math.log(p) + k * math.log(q) + (rest * math.log(r) if rest else 0.0)
            )
            terms.append(dm * (jn - harmonic(k)) * math.exp(logw))
    lhs = math.fsum(terms)
    rhs = multinomial_product_sums(n, p, q)
    mean_m = jn - binom_expect_J(n, p)
    mean_k = jn - binom_expect_J(n, q)
    return IdentityReport.compare(
        "multinomial_product", {"n": n, "p": p, "q": q}, lhs, rhs, EXACT_TOL,
        covariance=lhs - mean_m * mean_k,
    )


def sumtoint_closed_form(p: float, q: float) -> float:
    lp, lq = math.log(p), math.log(q)
    return (
        lp * lq - lq * math.log1p(-q) - lp * math.log1p(-p)
        + ZETA2 - dilog(1.0 - p) - dilog(1.0 - q)
    )


def _sumtoint_half(p: float, q: float, truncation: int) -> tuple[float, float]:
    # sum_{m<=T} (1-p)^m/m * sum_{k>m} a^k/k with a = 1 - q/(1-p); returns (value, tail bound).
    a = 1.0 - q / (1.0 - p)
    m = np.arange(1, truncation + 1, dtype=float)
    # Inner tails sum_{k>=m+1} a^k/k by reverse accumulation, smallest terms first.
    extra = int(math.ceil(60.0 / max(-math.log(a), 1e-300))) if a > 0 else 0
    K = truncation + 1 + extra
    k = np.arange(1, K + 1, dtype=float)
    ak = np.exp(k * math.log(a)) / k if a > 0 else np.zeros(K)
    remainder = a ** (K + 1) / ((K + 1) * (1 - a)) if a > 0 else 0.0
    rev = np.cumsum(ak[::-1])[::-1] + remainder  # rev[i] = sum_{k >= i+1}
    inner = rev[1 : truncation + 1]  # sum_{k >= m+1}
    outer = np.exp(m * math.log1p(-p)) / m
    value = math.fsum((outer * inner).tolist())
    # Tail over m > T: each inner tail is at most a^(m+1) / ((m+1)(1-a)).
    c = (1.0 - p) * a
    T = truncation
    bound = a * c ** (T + 1) / ((T + 1) * (T + 2) * (1.0 - a) * (1.0 - c)) if a < 1 else math.inf
    return value, bound + remainder


def verify_sumtoint(p: float, q: float, truncation: int = 5000) -> IdentityReport:
    """Double series with dilogarithm closed form; passes if gap <= 1e-8 + tail bound."""
    if not (0 < p < 1 and 0 < q < 1 and p + q < 1):
        raise ValueError(f"need p, q in (0, 1) with p + q < 1, got p={p}, q={q}")
    if truncation < 1000:
        raise ValueError(f"truncation must be at least 1000, got {truncation}")
    v1, b1 = _sumtoint_half(p, q, truncation)
    v2, b2 = _sumtoint_half(q, p, truncation)
    tail = b1 + b2
    return IdentityReport.compare(
        "dilog_double_series", {"p": p, "q": q, "truncation": truncation},
        v1 + v2, sumtoint_closed_form(p, q), SERIES_TOL + tail, tail_bound=tail,
    )


@dataclass
class LeCamResult:
    epsilon: float
    n: int
    kl: float
    entropy_gap: float
    risk_lower_bound: float
    kl_bound: float
    gap_bound: float

    @property
    def kl_ok(self) -> bool:
        return self.kl <= self.kl_bound

    @property
    def gap_ok(self) -> bool:
        return self.entropy_gap >= self.gap_bound

    def reports(self) -> list[BoundReport]:
        params = {"epsilon": self.epsilon, "n": self.n}
        return [
            BoundReport("lecam_kl", params, self.kl, self.kl_bound, "le", self.kl_ok),
            BoundReport("lecam_entropy_gap", params, self.entropy_gap, self.gap_bound, "ge",
                        self.gap_ok),
            BoundReport("lecam_risk", params, self.risk_lower_bound, 0.0, "ge",
                        self.risk_lower_bound > 0.0),
        ]


def lecam_two_point(epsilon: float, n: int) -> LeCamResult:
    """Two-point lower bound comparing (1/3, 2/3) with ((1+e)/3, (2-e)/3)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    p = (1.0 / 3.0, 2.0 / 3.0)
    q = ((1.0 + epsilon) / 3.0, (2.0 - epsilon) / 3.0)
    kl = math.fsum(a * math.log(a / b) for a, b in zip(p, q))
    h = lambda v: -math.fsum(x * math.log(x) for x in v)  # noqa: E731
    gap = h(q) - h(p)
    risk = 0.25 * gap**2 * math.exp(-n * kl)
    return LeCamResult(
        epsilon=epsilon, n=n, kl=kl, entropy_gap=gap, risk_lower_bound=risk,
        kl_bound=epsilon**2, gap_bound=epsilon * math.log(2.0) / 3.0 - epsilon**2,
    )


def _compositions(n: int, s: int):
    # all (c_1..c_s) with c_i >= 0 summing to n
    for bars in itertools.combinations(range(n + s - 1), s - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + s - 1 - prev - 1)
        yield out


def exhaustive_bias(pmf: Pmf, n: int) -> float:
    """``E[H_hat] - H`` by enumerating every count vector with multinomial weights."""
    if not isinstance(pmf, Finite):
        raise TypeError("exhaustive enumeration needs a finite distribution")
    if n < 2:
        raise ValueError(f"harmonic estimator needs n >= 2, got {n}")
    s = pmf.support_size
    if math.comb(n + s - 1, s - 1) > MAX_COMPOSITIONS:
        raise ValueError(f"enumeration too large: support {s}, n={n}")
    logp = [math.log(x) for x in pmf.probs]
    lgn = math.lgamma(n + 1)
    terms = []
    for comp in _compositions(n, s):
        logw = lgn + math.fsum(c * lp - math.lgamma(c + 1) for c, lp in zip(comp, logp))
        counts = [c for c in comp if c > 0]
        terms.append(math.exp(logw) * harmonic_estimate(counts))
    return math.fsum(terms) - pmf.entropy()


P_GRID = (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99)
REAL_PAIRS = ((0.3, 0.7), (0.5, 0.5), (0.9, 0.05), (1.2, -0.3), (-0.4, 2.5), (2.0, 3.0))
MULTI_PAIRS = ((0.1, 0.1), (0.2, 0.3), (0.05, 0.6), (0.45, 0.45))
SUMTOINT_POINTS = ((0.25, 0.25, 5000), (0.4, 0.5, 5000), (0.05, 0.05, 20000))
LECAM_N = (4, 25, 100, 400, 10000)


def identity_grid(grid: str = "default") -> list[tuple]:
    """``(function, args)`` pairs making up a verification grid."""
    if grid not in ("default", "extended"):
        raise ValueError(f"unknown grid {grid!r}")
    extended = grid == "extended"
    n_binom = range(1, (BINOMIAL_MAX_N if extended else 25) + 1)
    p_grid = P_GRID + ((0.001, 0.2, 0.33, 0.6, 0.999) if extended else ())
    n_closed = range(1, (CLOSED_FORM_MAX_N if extended else 12) + 1)
    n_multi = range(1, (MULTINOMIAL_MAX_N if extended else 12) + 1)
    multi = MULTI_PAIRS + (((0.01, 0.02), (0.3, 0.7), (0.6, 0.3)) if extended else ())
    points = SUMTOINT_POINTS + (((0.1, 0.8, 5000), (0.02, 0.3, 20000)) if extended else ())
    items = []
    items += [(verify_prop_mathind, (n, p)) for n in n_binom for p in p_grid]
    items += [(verify_second_moment, (n, p)) for n in n_binom for p in p_grid]
    items += [(verify_harmonic_binomial, (n, p, q)) for n in n_closed for p, q in REAL_PAIRS]
    items += [(verify_reciprocal_binomial, (n, p, q)) for n in n_closed for p, q in REAL_PAIRS]
    items += [(verify_multinomial_product, (n, p, q)) for n in n_multi for p, q in multi]
    items += [(verify_sumtoint, pt) for pt in points]
    return items


def run_identity_grid(grid: str = "default") -> list:
    """Evaluate a grid; identity reports sorted by name and parameters, then Le Cam checks."""
    reports = [fn(*args) for fn, args in identity_grid(grid)]
    reports.sort(key=lambda r: (r.identity_name, sorted(r.parameters.items())))
    lecam_n = LECAM_N + ((10**6,) if grid == "extended" else ())
    bounds = []
    for n in lecam_n:
        bounds += lecam_two_point(1.0 / math.sqrt(n), n).reports()
    return reports + bounds
