"""Input checks shared by the estimator functions and classes."""
from __future__ import annotations

import numbers

import numpy as np


def check_symbols(X, *, min_samples: int = 1) -> np.ndarray:
    """Validate a sample of symbols and return it as a 1-d integer array.

    A column vector of shape ``(n, 1)`` is accepted and flattened, so data
    coming out of a pipeline as a 2-d array works unchanged.
    """
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d sample of symbols, got shape {arr.shape}")
    if arr.size < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {arr.size}")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise ValueError("symbols must be integers")
        arr = arr.astype(np.int64)
    elif arr.dtype.kind not in "iu":
        raise ValueError(f"symbols must be integers, got dtype {arr.dtype}")
    return arr


def check_counts(counts, *, min_total: int = 1) -> np.ndarray:
    """Validate an array of positive integer counts."""
    arr = np.asarray(counts)
    if arr.ndim != 1:
        raise ValueError("counts must be one-dimensional")
    if arr.dtype.kind == "f":
        if np.any(arr != np.floor(arr)):
            raise ValueError("counts must be integers")
        arr = arr.astype(np.int64)
    elif arr.dtype.kind not in "iu":
        raise ValueError(f"counts must be integers, got dtype {arr.dtype}")
    if arr.size and arr.min() < 1:
        raise ValueError("every count must be at least 1")
    total = int(arr.sum())
    if total < min_total:
        raise ValueError(f"need a sample of size at least {min_total}, got {total}")
    return arr.astype(np.int64, copy=False)


def check_level(level) -> float:
    if not isinstance(level, numbers.Real) or not 0.0 < float(level) < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level!r}")
    return float(level)
