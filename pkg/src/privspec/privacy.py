"""Local differential privacy mechanism: truncation followed by Laplace noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import as_series, check_count, check_positive

__all__ = [
    "NO_PRIVACY",
    "PrivacyParams",
    "TruncationPolicy",
    "truncate",
    "laplace_inverse_cdf",
    "laplace_sample",
    "privatize",
    "verify_privacy_ratio",
    "LaplacePrivatizer",
]

# Sentinel privacy level: no truncation, no noise, zero randomness consumed.
NO_PRIVACY = math.inf


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy level alpha (finite positive, or NO_PRIVACY) and truncation threshold tau."""

    alpha: float
    tau: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if math.isnan(alpha) or alpha <= 0.0:
            raise ValueError(f"alpha must be positive (or NO_PRIVACY), got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "tau", check_positive(self.tau, "tau"))

    @property
    def is_private(self) -> bool:
        return math.isfinite(self.alpha)

    @property
    def noise_scale(self) -> float:
        """Laplace scale b = 2*tau/alpha (0 under NO_PRIVACY)."""
        return 2.0 * self.tau / self.alpha if self.is_private else 0.0

    @property
    def variance_offset(self) -> float:
        """Lag-0 covariance inflation 8*tau^2/alpha^2 added by the noise (0 under NO_PRIVACY)."""
        return 8.0 * self.tau**2 / self.alpha**2 if self.is_private else 0.0

    @property
    def penalty_factor(self) -> float:
        """Penalty inflation max(1, tau^4/alpha^4) (1 under NO_PRIVACY)."""
        return max(1.0, self.tau**4 / self.alpha**4) if self.is_private else 1.0


@dataclass(frozen=True)
class TruncationPolicy:
    """Threshold choice: a fixed tau, or the length-driven rule sqrt(56 * nu * log n)."""

    mode: str
    tau: float | None = None
    nu: float | None = None

    def __post_init__(self):
        if self.mode == "fixed":
            if self.nu is not None:
                raise ValueError("fixed mode takes tau only")
            object.__setattr__(self, "tau", check_positive(self.tau, "tau"))
        elif self.mode == "theoretical":
            if self.tau is not None:
                raise ValueError("theoretical mode takes nu only")
            object.__setattr__(self, "nu", check_positive(self.nu, "nu"))
        else:
            raise ValueError(f"mode must be 'fixed' or 'theoretical', got {self.mode!r}")

    @classmethod
    def fixed(cls, tau) -> "TruncationPolicy":
        return cls(mode="fixed", tau=tau)

    @classmethod
    def theoretical(cls, nu) -> "TruncationPolicy":
        return cls(mode="theoretical", nu=nu)

    def threshold(self, n) -> float:
        """Truncation threshold for a series of length n."""
        if self.mode == "fixed":
            return self.tau
        n = check_count(n, "n", minimum=2)
        return math.sqrt(56.0 * self.nu * math.log(n))


def truncate(x, tau) -> np.ndarray:
    """Clamp every value to [-tau, tau]."""
    arr = as_series(x, "x")
    tau = check_positive(tau, "tau")
    return np.clip(arr, -tau, tau)


def laplace_inverse_cdf(u, scale):
    """Map u in (-1/2, 1/2) to a centred Laplace(scale) quantile, -b*sign(u)*log(1-2|u|)."""
    scale = check_positive(scale, "scale")
    u_arr = np.asarray(u, dtype=float)
    if np.any(np.abs(u_arr) >= 0.5):
        raise ValueError("u must lie strictly inside (-1/2, 1/2)")
    out = -scale * np.sign(u_arr) * np.log1p(-2.0 * np.abs(u_arr))
    if np.ndim(u) == 0:
        return float(out)
    return out


def laplace_sample(scale, rng, size=None):
    """Centred Laplace(scale) draw(s) via the inverse CDF of rng's uniform stream.

    Returns a scalar when size is None, else an array of the given size.
    """
    scale = check_positive(scale, "scale")
    u = rng.random(size) - 0.5
    if size is None:
        # rng.random() covers [0, 1), so u = -1/2 is possible; redraw to stay inside the open interval
        while u == -0.5:
            u = rng.random() - 0.5
        return laplace_inverse_cdf(u, scale)
    bad = u == -0.5
    while np.any(bad):
        u[bad] = rng.random(int(bad.sum())) - 0.5
        bad = u == -0.5
    return laplace_inverse_cdf(u, scale)


def privatize(x, params: PrivacyParams, rng) -> np.ndarray:
    """Release Z = truncate(x, tau) + Laplace(2*tau/alpha) noise, elementwise.

    Under NO_PRIVACY the values pass through unchanged and the stream is not
    consumed, so downstream draws match a pipeline that never privatizes.
    """
    arr = as_series(x, "x")
    if not params.is_private:
        return arr.copy()
    return truncate(arr, params.tau) + laplace_sample(params.noise_scale, rng, size=arr.size)


def verify_privacy_ratio(params: PrivacyParams, x, x_prime) -> float:
    """Analytic supremum over z of the release-density ratio q(z | x) / q(z | x').

    Equals exp(alpha * |truncate(x) - truncate(x')| / (2*tau)), which is at most
    exp(alpha) since truncated values differ by at most 2*tau.
    """
    if not params.is_private:
        raise ValueError("privacy ratio is undefined under NO_PRIVACY")
    xt = min(max(float(x), -params.tau), params.tau)
    xpt = min(max(float(x_prime), -params.tau), params.tau)
    return math.exp(params.alpha * abs(xt - xpt) / (2.0 * params.tau))


class LaplacePrivatizer(TransformerMixin, BaseEstimator):
    """Transformer wrapper around privatize for pipeline use.

    transform re-derives its generator from random_state on every call, so it
    is a pure function of (X, parameters): repeated calls give identical
    output. Accepts 1-d series.
    """

    def __init__(self, alpha=NO_PRIVACY, tau=4.0, random_state=None):
        self.alpha = alpha
        self.tau = tau
        self.random_state = random_state

    def _params(self) -> PrivacyParams:
        return PrivacyParams(self.alpha, self.tau)

    def fit(self, X, y=None):
        as_series(X, "X")
        self._params()
        self.n_samples_in_ = int(np.asarray(X).shape[0])
        return self

    def transform(self, X) -> np.ndarray:
        params = self._params()
        rng = np.random.default_rng(self.random_state)
        return privatize(X, params, rng)
