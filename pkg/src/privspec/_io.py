"""CSV serialization for series, covariances, estimates, traces, and reports.

Every writer emits comment lines (prefixed '#') before the column header, and
formats floats with repr so values round-trip exactly through the paired
reader. Files are written atomically (temp file in the target directory, then
rename).
"""

from __future__ import annotations

import math
import os
import tempfile

import numpy as np

from .estimator import SelectionTrace, SpectralEstimate
from .experiment import QuantileCurves, RiskReport
from .spectral import CovarianceSequence

__all__ = [
    "format_alpha",
    "parse_alpha",
    "atomic_write_text",
    "write_series_csv",
    "read_series_csv",
    "write_covariances_csv",
    "read_covariances_csv",
    "write_estimate_csv",
    "read_estimate_csv",
    "write_trace_csv",
    "read_trace_csv",
    "write_results_csv",
    "read_results_csv",
    "write_curves_csv",
    "read_curves_csv",
    "write_density_csv",
    "read_density_csv",
]


def _fmt(x) -> str:
    return repr(float(x))


def format_alpha(alpha: float) -> str:
    """Render a privacy level for file output ('inf' for the no-privacy sentinel)."""
    alpha = float(alpha)
    return "inf" if math.isinf(alpha) else _fmt(alpha)


def parse_alpha(text: str) -> float:
    value = float(text)
    if math.isnan(value) or value <= 0.0:
        raise ValueError(f"alpha must be positive or 'inf', got {text!r}")
    return value


def atomic_write_text(path, text: str):
    """Write text to path via a same-directory temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_lines(path):
    with open(os.fspath(path), "r", encoding="utf-8") as handle:
        raw = [line.rstrip("\n") for line in handle]
    comments = [line[1:].strip() for line in raw if line.startswith("#")]
    rows = [line for line in raw if line and not line.startswith("#")]
    if not rows:
        raise ValueError(f"{path}: no header row found")
    return comments, rows[0], rows[1:]


def _comment_fields(comments) -> dict:
    out = {}
    for line in comments:
        for token in line.split():
            if "=" in token:
                key, _, value = token.partition("=")
                out[key] = value
    return out


def _expect_header(actual: str, expected: str, path):
    if actual != expected:
        raise ValueError(f"{path}: expected header {expected!r}, got {actual!r}")


def write_series_csv(path, values, comment: str):
    lines = [f"# {comment}", "value"]
    lines.extend(_fmt(v) for v in np.asarray(values, dtype=float))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_series_csv(path):
    """Return (values, comment fields dict)."""
    comments, header, rows = _read_lines(path)
    _expect_header(header, "value", path)
    values = np.array([float(row) for row in rows])
    return values, _comment_fields(comments)


def write_covariances_csv(path, cov: CovarianceSequence, tau=None, alpha=None):
    tau_text = "none" if tau is None else _fmt(tau)
    alpha_text = "none" if alpha is None else format_alpha(alpha)
    lines = [
        f"# n={cov.n} tau={tau_text} alpha={alpha_text} debiased={int(cov.debiased)}",
        "lag,value",
    ]
    lines.extend(f"{lag},{_fmt(value)}" for lag, value in enumerate(cov.c))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_covariances_csv(path):
    """Return (CovarianceSequence, comment fields dict)."""
    comments, header, rows = _read_lines(path)
    _expect_header(header, "lag,value", path)
    fields = _comment_fields(comments)
    values = np.empty(len(rows))
    for i, row in enumerate(rows):
        lag_text, _, value_text = row.partition(",")
        if int(lag_text) != i:
            raise ValueError(f"{path}: lags must be contiguous from 0, got {lag_text} at row {i}")
        values[i] = float(value_text)
    cov = CovarianceSequence(values, n=len(rows), debiased=fields.get("debiased") == "1")
    return cov, fields


def write_estimate_csv(path, est: SpectralEstimate):
    meta = est.meta
    n_text = str(meta.get("n", "none"))
    tau_text = "none" if meta.get("tau") is None else _fmt(meta["tau"])
    alpha_text = "none" if meta.get("alpha") is None else format_alpha(meta["alpha"])
    kappa_text = "none" if meta.get("kappa") is None else _fmt(meta["kappa"])
    lines = [
        f"# family={est.family} d={est.d} n={n_text} tau={tau_text} "
        f"alpha={alpha_text} kappa={kappa_text}",
        "index,coefficient",
    ]
    lines.extend(f"{i},{_fmt(value)}" for i, value in enumerate(est.coeffs))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_estimate_csv(path) -> SpectralEstimate:
    comments, header, rows = _read_lines(path)
    _expect_header(header, "index,coefficient", path)
    fields = _comment_fields(comments)
    coeffs = np.array([float(row.partition(",")[2]) for row in rows])
    meta = {}
    if fields.get("n", "none") != "none":
        meta["n"] = int(fields["n"])
    for key in ("tau", "kappa"):
        if fields.get(key, "none") != "none":
            meta[key] = float(fields[key])
    if fields.get("alpha", "none") != "none":
        meta["alpha"] = parse_alpha(fields["alpha"])
    return SpectralEstimate(fields["family"], int(fields["d"]), coeffs, meta)


def write_trace_csv(path, trace: SelectionTrace):
    lines = ["d,contrast,penalty,criterion,selected"]
    for i, d in enumerate(trace.d):
        selected = 1 if int(d) == trace.selected_d else 0
        lines.append(
            f"{int(d)},{_fmt(trace.contrast[i])},{_fmt(trace.penalty[i])},"
            f"{_fmt(trace.criterion[i])},{selected}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_trace_csv(path) -> SelectionTrace:
    _, header, rows = _read_lines(path)
    _expect_header(header, "d,contrast,penalty,criterion,selected", path)
    parts = [row.split(",") for row in rows]
    d = np.array([int(p[0]) for p in parts])
    selected_rows = [int(p[0]) for p in parts if p[4] == "1"]
    if len(selected_rows) != 1:
        raise ValueError(f"{path}: exactly one row must be marked selected")
    return SelectionTrace(
        d=d,
        contrast=np.array([float(p[1]) for p in parts]),
        penalty=np.array([float(p[2]) for p in parts]),
        criterion=np.array([float(p[3]) for p in parts]),
        selected_d=selected_rows[0],
    )


def write_results_csv(path, reports):
    lines = ["n,alpha,tau,kappa,T,mean_risk,std_risk,ci95,master_seed"]
    for rep in reports:
        lines.append(
            f"{rep.n},{format_alpha(rep.alpha)},{_fmt(rep.tau)},{_fmt(rep.kappa)},"
            f"{rep.T},{_fmt(rep.mean_risk)},{_fmt(rep.std_risk)},{_fmt(rep.ci95)},"
            f"{rep.master_seed}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_results_csv(path):
    _, header, rows = _read_lines(path)
    _expect_header(header, "n,alpha,tau,kappa,T,mean_risk,std_risk,ci95,master_seed", path)
    reports = []
    for row in rows:
        p = row.split(",")
        reports.append(
            RiskReport(
                n=int(p[0]),
                alpha=parse_alpha(p[1]),
                tau=float(p[2]),
                kappa=float(p[3]),
                T=int(p[4]),
                mean_risk=float(p[5]),
                std_risk=float(p[6]),
                ci95=float(p[7]),
                master_seed=int(p[8]),
            )
        )
    return reports


def write_density_csv(path, omega, f_hat):
    omega = np.asarray(omega, dtype=float)
    f_hat = np.asarray(f_hat, dtype=float)
    if omega.shape != f_hat.shape:
        raise ValueError("omega and f_hat must have matching shapes")
    lines = ["omega,f_hat"]
    lines.extend(f"{_fmt(w)},{_fmt(v)}" for w, v in zip(omega, f_hat))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_density_csv(path):
    """Return (omega, f_hat) arrays."""
    _, header, rows = _read_lines(path)
    _expect_header(header, "omega,f_hat", path)
    data = np.array([[float(cell) for cell in row.split(",")] for row in rows])
    return data[:, 0], data[:, 1]


def write_curves_csv(path, curves: QuantileCurves):
    lines = [
        f"# n={curves.n} alpha={format_alpha(curves.alpha)}",
        "omega,f_true,f_hat_mean,q05,q95",
    ]
    for i in range(curves.omega.size):
        lines.append(
            f"{_fmt(curves.omega[i])},{_fmt(curves.f_true[i])},"
            f"{_fmt(curves.f_hat_mean[i])},{_fmt(curves.q05[i])},{_fmt(curves.q95[i])}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_curves_csv(path) -> QuantileCurves:
    comments, header, rows = _read_lines(path)
    _expect_header(header, "omega,f_true,f_hat_mean,q05,q95", path)
    fields = _comment_fields(comments)
    data = np.array([[float(cell) for cell in row.split(",")] for row in rows])
    return QuantileCurves(
        n=int(fields["n"]),
        alpha=parse_alpha(fields["alpha"]),
        omega=data[:, 0],
        f_true=data[:, 1],
        f_hat_mean=data[:, 2],
        q05=data[:, 3],
        q95=data[:, 4],
    )
