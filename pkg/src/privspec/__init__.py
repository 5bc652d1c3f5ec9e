"""Spectral density estimation from locally differentially private time series.

The pipeline: simulate (or load) a stationary Gaussian series, release it
through truncation plus Laplace noise, compute empirical autocovariances,
subtract the noise-variance offset, project onto a histogram or Fourier basis,
and pick the dimension with a penalized contrast criterion. A Monte Carlo
harness reproduces the benchmark risk table and quantile curves.
"""

from .estimator import (
    ModelFamily,
    SelectionTrace,
    SpectralDensityEstimator,
    SpectralEstimate,
    evaluate,
    fourier_coefficients,
    histogram_coefficients,
    penalty,
    select_model,
)
from .experiment import (
    ExperimentConfig,
    QuantileCurves,
    RiskReport,
    l2_risk,
    replication_stream,
    run_experiment,
    run_replication,
)
from .privacy import (
    NO_PRIVACY,
    LaplacePrivatizer,
    PrivacyParams,
    TruncationPolicy,
    laplace_inverse_cdf,
    laplace_sample,
    privatize,
    truncate,
    verify_privacy_ratio,
)
from .spectral import (
    CovarianceSequence,
    debias,
    debiased_periodogram,
    empirical_covariances,
    periodogram,
)
from .timeseries import ArmaNoiseModel, BENCHMARK_MODEL, simulate, true_spectral_density

__version__ = "0.1.0"

__all__ = [
    "ArmaNoiseModel",
    "BENCHMARK_MODEL",
    "simulate",
    "true_spectral_density",
    "NO_PRIVACY",
    "PrivacyParams",
    "TruncationPolicy",
    "truncate",
    "laplace_inverse_cdf",
    "laplace_sample",
    "privatize",
    "verify_privacy_ratio",
    "LaplacePrivatizer",
    "CovarianceSequence",
    "empirical_covariances",
    "debias",
    "periodogram",
    "debiased_periodogram",
    "ModelFamily",
    "SpectralEstimate",
    "SelectionTrace",
    "histogram_coefficients",
    "fourier_coefficients",
    "evaluate",
    "penalty",
    "select_model",
    "SpectralDensityEstimator",
    "ExperimentConfig",
    "RiskReport",
    "QuantileCurves",
    "l2_risk",
    "replication_stream",
    "run_replication",
    "run_experiment",
    "__version__",
]
