"""Shared input-checking helpers."""

from __future__ import annotations

import math

import numpy as np


def as_series(x, name: str = "x", min_length: int = 1) -> np.ndarray:
    """Coerce to a 1-d float array of finite values."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValueError(f"{name} must have length >= {min_length}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain finite values only")
    return arr


def check_count(value, name: str, minimum: int = 1) -> int:
    """Validate an integer count (rejects bools and non-integral floats)."""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_positive(value, name: str) -> float:
    """Validate a finite, strictly positive real."""
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a finite positive number, got {value}")
    return value
