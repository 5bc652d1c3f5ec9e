"""Empirical autocovariances, the centred periodogram, and noise-variance debiasing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_series
from .privacy import PrivacyParams

__all__ = [
    "CovarianceSequence",
    "empirical_covariances",
    "debias",
    "periodogram",
    "debiased_periodogram",
]


@dataclass(frozen=True)
class CovarianceSequence:
    """Autocovariances c_0..c_{n-1} of a length-n series, with debiasing state."""

    c: np.ndarray
    n: int
    debiased: bool = False

    def __post_init__(self):
        arr = np.array(self.c, dtype=float)
        if arr.ndim != 1 or arr.size != self.n:
            raise ValueError(f"c must be a 1-d array of length n={self.n}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("covariances must be finite")
        if not self.debiased and arr[0] < 0.0:
            raise ValueError("c_0 is a sample variance and cannot be negative before debiasing")
        arr.flags.writeable = False
        object.__setattr__(self, "c", arr)
        object.__setattr__(self, "n", int(self.n))


def empirical_covariances(z) -> CovarianceSequence:
    """Biased-normalization autocovariances of one series.

    c_r = (1/n) * sum_{k=1}^{n-r} (z_k - mean)(z_{k+r} - mean) for r = 0..n-1,
    computed with an FFT autocorrelation. Zero-padding to at least 2n makes the
    circular correlation equal the linear one.
    """
    arr = as_series(z, "z", min_length=2)
    n = arr.size
    u = arr - arr.mean()
    m = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(u, m)
    c = np.fft.irfft(spec * np.conj(spec), m)[:n] / n
    # the FFT round-trip can leave a tiny negative residue at lag 0 for near-constant input
    if c[0] < 0.0:
        c[0] = 0.0
    return CovarianceSequence(c=c, n=n, debiased=False)


def debias(cov: CovarianceSequence, params: PrivacyParams) -> CovarianceSequence:
    """Subtract the noise variance 8*tau^2/alpha^2 from c_0 (0 under NO_PRIVACY).

    Returns a new sequence marked debiased; debiasing twice is an error.
    """
    if cov.debiased:
        raise RuntimeError("covariance sequence is already debiased")
    c = cov.c.copy()
    c[0] -= params.variance_offset
    return CovarianceSequence(c=c, n=cov.n, debiased=True)


def periodogram(z, omega):
    """Centred periodogram I_n(w) = (1/(2 pi n)) |sum_t (z_t - mean) e^{-i t w}|^2.

    Vectorized over omega; evaluation is chunked so the (omega, t) phase matrix
    stays within a bounded memory footprint.
    """
    arr = as_series(z, "z", min_length=1)
    n = arr.size
    u = arr - arr.mean()
    w = np.asarray(omega, dtype=float)
    flat = np.atleast_1d(w).ravel()
    t = np.arange(1, n + 1)
    out = np.empty(flat.size)
    step = max(1, 2_000_000 // n)
    for start in range(0, flat.size, step):
        block = flat[start : start + step]
        phases = np.exp(-1j * np.outer(block, t))
        out[start : start + step] = np.abs(phases @ u) ** 2 / (2.0 * np.pi * n)
    if np.ndim(omega) == 0:
        return float(out[0])
    return out.reshape(w.shape)


def debiased_periodogram(z, params: PrivacyParams, omega):
    """Periodogram minus the noise offset 8*tau^2/alpha^2 (may be negative)."""
    raw = periodogram(z, omega)
    offset = params.variance_offset
    if np.ndim(omega) == 0:
        return float(raw - offset)
    return raw - offset
