"""Shannon entropy estimation with harmonic numbers."""

__version__ = "0.1.0"

from .distributions import (
    Finite,
    Geometric,
    Pmf,
    SampleDraw,
    Zeta,
    entropy,
    exact_bias,
    from_spec,
    mass,
    sample,
    tail_moment,
    var_log_p,
)
from .estimators import (
    CountsHistogram,
    EstimateReport,
    HarmonicEntropy,
    MillerMadowEntropy,
    PluginEntropy,
    estimate,
    harmonic_estimate,
    miller_estimate,
    oracle_estimate,
    plugin_estimate,
    variance_estimate,
    wald_ci,
)
from .special import HarmonicTable, dilog, harmonic, log_tail_series

__all__ = [
    "CountsHistogram",
    "EstimateReport",
    "Finite",
    "Geometric",
    "HarmonicEntropy",
    "HarmonicTable",
    "MillerMadowEntropy",
    "PluginEntropy",
    "Pmf",
    "SampleDraw",
    "Zeta",
    "dilog",
    "entropy",
    "estimate",
    "exact_bias",
    "from_spec",
    "harmonic",
    "harmonic_estimate",
    "log_tail_series",
    "mass",
    "miller_estimate",
    "oracle_estimate",
    "plugin_estimate",
    "sample",
    "tail_moment",
    "var_log_p",
    "variance_estimate",
    "wald_ci",
]
