"""Gaussian test process (ARMA(2,2) plus independent white noise) and its exact spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ._validation import check_count

__all__ = ["ArmaNoiseModel", "BENCHMARK_MODEL", "simulate", "true_spectral_density"]


@dataclass(frozen=True)
class ArmaNoiseModel:
    """Parameters of the test process X_t = Y_t + sigma * W_t.

    Y follows the order-(2,2) recursion
    Y_t = -a1 * Y_{t-1} - a2 * Y_{t-2} + b0 * e_t + b1 * e_{t-1} + b2 * e_{t-2}
    with (e_t) and (W_t) independent streams of standard Gaussians.
    """

    a1: float
    a2: float
    b0: float
    b1: float
    b2: float
    sigma: float = 0.0

    def __post_init__(self):
        for name in ("a1", "a2", "b0", "b1", "b2", "sigma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        # Stationarity: every root of 1 + a1*z + a2*z^2 strictly outside the unit circle.
        roots = np.roots([self.a2, self.a1, 1.0])
        if roots.size and np.any(np.abs(roots) <= 1.0):
            raise ValueError(
                "non-stationary model: 1 + a1*z + a2*z^2 has a root inside or on the unit circle"
            )

    @property
    def ar(self) -> np.ndarray:
        """Autoregressive polynomial coefficients (1, a1, a2)."""
        return np.array([1.0, self.a1, self.a2])

    @property
    def ma(self) -> np.ndarray:
        """Moving-average polynomial coefficients (b0, b1, b2)."""
        return np.array([self.b0, self.b1, self.b2])


BENCHMARK_MODEL = ArmaNoiseModel(a1=0.2, a2=0.9, b0=1.0, b1=0.0, b2=1.0, sigma=0.5)


def simulate(model: ArmaNoiseModel, n, burn_in=2000, *, rng) -> np.ndarray:
    """Draw one series of length n from the model, dropping burn_in startup steps.

    The recursion starts from a zero state; burn_in steps let the transient
    decay before the retained stretch. Draw order is fixed (burn_in + n
    innovations first, then n white-noise values), so equal seeds give
    bit-identical output.
    """
    n = check_count(n, "n", minimum=1)
    burn_in = check_count(burn_in, "burn_in", minimum=0)
    eps = rng.standard_normal(burn_in + n)
    arma = lfilter(model.ma, model.ar, eps)[burn_in:]
    return arma + model.sigma * rng.standard_normal(n)


def true_spectral_density(model: ArmaNoiseModel, omega):
    """Exact spectral density of the model at angular frequency omega.

    f(w) = (1/2pi) |b0 + b1 e^{-iw} + b2 e^{-2iw}|^2 / |1 + a1 e^{-iw} + a2 e^{-2iw}|^2
           + sigma^2 / (2pi).

    Vectorized over omega; the closed form is 2pi-periodic and symmetric.
    """
    w = np.asarray(omega, dtype=float)
    z = np.exp(-1j * w)
    num = np.abs(model.b0 + model.b1 * z + model.b2 * z * z) ** 2
    den = np.abs(1.0 + model.a1 * z + model.a2 * z * z) ** 2
    out = (num / den + model.sigma**2) / (2.0 * np.pi)
    if np.ndim(omega) == 0:
        return float(out)
    return out
