"""Projection estimators (histogram and Fourier families) with penalized model selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_series, check_count
from .privacy import NO_PRIVACY, PrivacyParams
from .spectral import CovarianceSequence, debias, empirical_covariances

__all__ = [
    "ModelFamily",
    "SpectralEstimate",
    "SelectionTrace",
    "histogram_coefficients",
    "fourier_coefficients",
    "evaluate",
    "penalty",
    "select_model",
    "SpectralDensityEstimator",
]

_FAMILIES = ("histogram", "fourier")


@dataclass(frozen=True)
class ModelFamily:
    """Basis family and the dimension range searched by select_model.

    Histogram: d cells of equal width on [0, pi), basis sqrt(d/pi) * indicator.
    Fourier: constant 1/sqrt(2 pi) plus cos(j w)/sqrt(pi), j = 1..d.
    """

    kind: str
    d_min: int = 1
    d_max: int = 50

    def __post_init__(self):
        if self.kind not in _FAMILIES:
            raise ValueError(f"kind must be one of {_FAMILIES}, got {self.kind!r}")
        object.__setattr__(self, "d_min", check_count(self.d_min, "d_min", minimum=1))
        object.__setattr__(self, "d_max", check_count(self.d_max, "d_max", minimum=1))
        if self.d_min > self.d_max:
            raise ValueError(f"d_min={self.d_min} must not exceed d_max={self.d_max}")


@dataclass(frozen=True)
class SpectralEstimate:
    """Fitted projection estimate: family kind, dimension, and coefficient vector.

    coeffs has length d for the histogram family and d + 1 for the Fourier
    family (the constant term comes first). meta records (n, tau, alpha, kappa)
    provenance when the estimate comes from the full pipeline.
    """

    family: str
    d: int
    coeffs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"family must be one of {_FAMILIES}, got {self.family!r}")
        d = check_count(self.d, "d", minimum=1)
        arr = np.array(self.coeffs, dtype=float)
        expected = d if self.family == "histogram" else d + 1
        if arr.ndim != 1 or arr.size != expected:
            raise ValueError(
                f"coeffs must be a 1-d array of length {expected} for family "
                f"{self.family!r} at d={d}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "d", d)

    def __call__(self, omega):
        return evaluate(self, omega)


@dataclass(frozen=True)
class SelectionTrace:
    """Per-dimension criterion record: crit(d) = contrast(d) + penalty(d)."""

    d: np.ndarray
    contrast: np.ndarray
    penalty: np.ndarray
    criterion: np.ndarray
    selected_d: int

    def __post_init__(self):
        for name in ("d", "contrast", "penalty", "criterion"):
            arr = np.array(getattr(self, name))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.selected_d not in self.d:
            raise ValueError("selected_d must appear in the searched dimensions")


def _require_debiased(cov: CovarianceSequence):
    if not cov.debiased:
        raise ValueError(
            "covariances must be debiased first (debias() is a no-op under NO_PRIVACY)"
        )


def histogram_coefficients(cov: CovarianceSequence, d) -> np.ndarray:
    """Projection coefficients onto d equal-width cells of [0, pi).

    a_j = sqrt(d/pi) * [ c_0/(2d)
          + (1/pi) * sum_{r=1}^{n-1} (c_r/r) * (sin(pi(j+1)r/d) - sin(pi j r/d)) ]
    for j = 0..d-1. The sines depend on r only through r mod 2d, so the lag
    weights c_r/r are folded into 2d residue classes before the j sweep, which
    drops the cost from O(n*d) to O(n + d^2).
    """
    _require_debiased(cov)
    d = check_count(d, "d", minimum=1)
    if d > cov.n:
        raise ValueError(f"d={d} exceeds the series length n={cov.n}")
    r = np.arange(1, cov.n)
    weights = cov.c[1:] / r
    folded = np.bincount(r % (2 * d), weights=weights, minlength=2 * d)
    j = np.arange(d + 1)
    cumsin = np.sin(np.pi * np.outer(j, np.arange(2 * d)) / d) @ folded
    return np.sqrt(d / np.pi) * (cov.c[0] / (2 * d) + (cumsin[1:] - cumsin[:-1]) / np.pi)


def fourier_coefficients(cov: CovarianceSequence, d) -> np.ndarray:
    """Projection coefficients onto the cosine family of order d.

    Returns (a_0, a_1, .., a_d) with a_0 = c_0/sqrt(2 pi) for the constant
    basis function and a_j = c_j/sqrt(pi) for cos(j w)/sqrt(pi). Sine terms
    vanish by symmetry and are omitted. Requires d <= n - 1.
    """
    _require_debiased(cov)
    d = check_count(d, "d", minimum=1)
    if d > cov.n - 1:
        raise ValueError(f"d={d} needs lag {d} but only lags 0..{cov.n - 1} exist")
    out = np.empty(d + 1)
    out[0] = cov.c[0] / math.sqrt(2.0 * np.pi)
    out[1:] = cov.c[1 : d + 1] / math.sqrt(np.pi)
    return out


def evaluate(est: SpectralEstimate, omega):
    """Evaluate the estimate at omega in [-pi, pi] (symmetric; no clipping)."""
    w = np.asarray(omega, dtype=float)
    if np.any(np.isnan(w)) or np.any(np.abs(w) > np.pi):
        raise ValueError("omega must lie in [-pi, pi]")
    aw = np.abs(w)
    if est.family == "histogram":
        # floor(|w| d / pi) with |w| = pi mapped into the last cell
        idx = np.minimum((aw * est.d / np.pi).astype(int), est.d - 1)
        out = est.coeffs[idx] * math.sqrt(est.d / np.pi)
    else:
        j = np.arange(1, est.d + 1)
        cosines = np.cos(np.multiply.outer(aw, j))
        out = est.coeffs[0] / math.sqrt(2.0 * np.pi) + (cosines @ est.coeffs[1:]) / math.sqrt(
            np.pi
        )
    if np.ndim(omega) == 0:
        return float(out)
    return out


def penalty(d, n, params: PrivacyParams, kappa=1.0) -> float:
    """Model-complexity penalty kappa * (d/n) * max(1, tau^4/alpha^4)."""
    d = check_count(d, "d", minimum=1)
    n = check_count(n, "n", minimum=1)
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa <= 0.0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return kappa * (d / n) * params.penalty_factor


def select_model(
    cov: CovarianceSequence, family: ModelFamily, params: PrivacyParams, kappa=1.0
):
    """Minimize crit(d) = -sum_j a_j(d)^2 + kappa*(d/n)*max(1, tau^4/alpha^4) over d.

    The searched range is [d_min, min(d_max, n-1)]. kappa = 0 disables the
    penalty; ties pick the smallest dimension. Returns the winning estimate and
    the full per-dimension trace.
    """
    _require_debiased(cov)
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa < 0.0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    d_hi = min(family.d_max, cov.n - 1)
    if d_hi < family.d_min:
        raise ValueError(
            f"dimension range [{family.d_min}, {family.d_max}] is empty for n={cov.n} "
            f"(effective upper bound {d_hi})"
        )
    dims = np.arange(family.d_min, d_hi + 1)
    penalties = kappa * (dims / cov.n) * params.penalty_factor

    if family.kind == "fourier":
        # coefficients are prefix-stable in d: compute once at d_hi, use running sums
        coeffs_full = fourier_coefficients(cov, d_hi)
        sq = coeffs_full**2
        norms = np.concatenate(([sq[0]], sq[0] + np.cumsum(sq[1:])))
        contrasts = -norms[dims]
        coeffs_for = lambda d: coeffs_full[: d + 1]
    else:
        per_d = [histogram_coefficients(cov, int(d)) for d in dims]
        contrasts = -np.array([a @ a for a in per_d])
        coeffs_for = lambda d: per_d[int(d) - family.d_min]

    criteria = contrasts + penalties
    # argmin returns the first minimizer, which is the smallest dimension on ties
    best = int(np.argmin(criteria))
    d_hat = int(dims[best])
    meta = {"n": cov.n, "tau": params.tau, "alpha": params.alpha, "kappa": kappa}
    estimate = SpectralEstimate(family.kind, d_hat, coeffs_for(d_hat), meta)
    trace = SelectionTrace(dims, contrasts, penalties, criteria, d_hat)
    return estimate, trace


class SpectralDensityEstimator(BaseEstimator):
    """Estimator-API wrapper: fit on one observed series, predict density values.

    fit(X) takes the released (possibly privatized) 1-d series, computes
    empirical covariances, subtracts the noise offset implied by (alpha, tau),
    and runs penalized model selection. predict(omega) evaluates the fitted
    density at angular frequencies in [-pi, pi].
    """

    def __init__(
        self, family="histogram", d_min=1, d_max=50, kappa=1.0, alpha=NO_PRIVACY, tau=4.0
    ):
        self.family = family
        self.d_min = d_min
        self.d_max = d_max
        self.kappa = kappa
        self.alpha = alpha
        self.tau = tau

    def fit(self, X, y=None):
        z = as_series(X, "X", min_length=2)
        params = PrivacyParams(self.alpha, self.tau)
        fam = ModelFamily(self.family, self.d_min, self.d_max)
        cov = debias(empirical_covariances(z), params)
        estimate, trace = select_model(cov, fam, params, self.kappa)
        self.estimate_ = estimate
        self.trace_ = trace
        self.coefficients_ = estimate.coeffs
        self.dimension_ = estimate.d
        self.n_samples_in_ = z.size
        return self

    def predict(self, X):
        check_is_fitted(self, "estimate_")
        return evaluate(self.estimate_, np.asarray(X, dtype=float))
