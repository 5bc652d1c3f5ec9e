"""Command-line interface: simulate, privatize, estimate, and experiment subcommands.

Exit codes: 0 success, 2 validation or usage error, 3 I/O error, 4 numeric
failure. The worker count for experiments defaults to the PRIVSPEC_JOBS
environment variable; the --jobs flag overrides it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np
from jsonschema import Draft202012Validator

from . import _io
from ._validation import as_series
from .estimator import ModelFamily, select_model
from .experiment import ExperimentConfig, run_experiment
from .privacy import PrivacyParams, privatize
from .spectral import debias, empirical_covariances
from .timeseries import ArmaNoiseModel, BENCHMARK_MODEL, simulate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

JOBS_ENV_VAR = "PRIVSPEC_JOBS"

_MODEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["a1", "a2", "b0", "b1", "b2", "sigma"],
    "properties": {
        "a1": {"type": "number"},
        "a2": {"type": "number"},
        "b0": {"type": "number"},
        "b1": {"type": "number"},
        "b2": {"type": "number"},
        "sigma": {"type": "number", "minimum": 0},
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["lengths", "alphas", "tau", "kappa", "replications", "master_seed"],
    "properties": {
        "model": _MODEL_SCHEMA,
        "lengths": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "integer", "minimum": 2},
        },
        "alphas": {
            "type": "array",
            "minItems": 1,
            "items": {
                "anyOf": [
                    {"type": "number", "exclusiveMinimum": 0},
                    {"const": "inf"},
                ]
            },
        },
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "kappa": {"type": "number", "minimum": 0},
        "family": {"enum": ["histogram", "fourier"]},
        "d_min": {"type": "integer", "minimum": 1},
        "d_max": {"type": "integer", "minimum": 1},
        "replications": {"type": "integer", "minimum": 1},
        "master_seed": {"type": "integer", "minimum": 0},
        "risk_grid_size": {"type": "integer", "minimum": 256},
        "out_dir": {"type": "string"},
        "verbosity": {"type": "integer", "minimum": 0, "maximum": 2},
    },
}


class CliError(Exception):
    """Error with an associated process exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _json_pointer(error) -> str:
    return "/" + "/".join(str(part) for part in error.absolute_path)


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"{path} is not valid JSON: {exc}") from exc


def _validate_config_document(doc, path):
    validator = Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=_json_pointer)
    if errors:
        lines = [f"{path}: config validation failed"]
        lines.extend(f"  {_json_pointer(err)}: {err.message}" for err in errors)
        raise CliError(EXIT_USAGE, "\n".join(lines))


def _model_from_doc(doc) -> ArmaNoiseModel:
    if doc is None:
        return BENCHMARK_MODEL
    return ArmaNoiseModel(**doc)


def load_config(path):
    """Read, schema-validate, and materialize an experiment config file.

    Returns (ExperimentConfig, extras) where extras carries the out_dir and
    verbosity keys that belong to the CLI rather than the harness.
    """
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise CliError(EXIT_USAGE, f"{path}: config must be a JSON object")
    _validate_config_document(doc, path)
    try:
        model = _model_from_doc(doc.get("model"))
        family = ModelFamily(
            doc.get("family", "histogram"), doc.get("d_min", 1), doc.get("d_max", 50)
        )
        config = ExperimentConfig(
            model=model,
            lengths=tuple(doc["lengths"]),
            alphas=tuple(math.inf if a == "inf" else float(a) for a in doc["alphas"]),
            tau=doc["tau"],
            kappa=doc["kappa"],
            family=family,
            replications=doc["replications"],
            master_seed=doc["master_seed"],
            risk_grid_size=doc.get("risk_grid_size", 8192),
        )
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}") from exc
    extras = {"out_dir": doc.get("out_dir"), "verbosity": doc.get("verbosity", 0)}
    return config, extras


def _parse_alpha_flag(text: str) -> float:
    try:
        return _io.parse_alpha(text)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"invalid --alpha: {exc}") from exc


def _alpha_slug(alpha: float) -> str:
    return "inf" if math.isinf(alpha) else f"{alpha:g}"


def _read_series(path) -> np.ndarray:
    try:
        values, _ = _io.read_series_csv(path)
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read input series {path}: {exc}") from exc
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}") from exc
    try:
        return as_series(values, "input series", min_length=1)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}") from exc


def cmd_simulate(args) -> int:
    if args.n < 1:
        raise CliError(EXIT_USAGE, "invalid --n: must be >= 1")
    if args.burn_in < 0:
        raise CliError(EXIT_USAGE, "invalid --burn-in: must be >= 0")
    model = BENCHMARK_MODEL
    if args.config is not None:
        doc = _load_json(args.config)
        if not isinstance(doc, dict):
            raise CliError(EXIT_USAGE, f"{args.config}: config must be a JSON object")
        model_doc = doc.get("model", doc if "a1" in doc else None)
        if model_doc is not None:
            errors = sorted(
                Draft202012Validator(_MODEL_SCHEMA).iter_errors(model_doc), key=_json_pointer
            )
            if errors:
                lines = [f"{args.config}: model validation failed"]
                lines.extend(f"  {_json_pointer(e)}: {e.message}" for e in errors)
                raise CliError(EXIT_USAGE, "\n".join(lines))
            model = ArmaNoiseModel(**model_doc)
    rng = np.random.default_rng(args.seed)
    values = simulate(model, args.n, args.burn_in, rng=rng)
    comment = (
        f"simulated n={args.n} seed={args.seed} burn_in={args.burn_in} "
        f"a1={model.a1:g} a2={model.a2:g} b0={model.b0:g} b1={model.b1:g} "
        f"b2={model.b2:g} sigma={model.sigma:g}"
    )
    _io.write_series_csv(args.out, values, comment)
    return EXIT_OK


def cmd_privatize(args) -> int:
    alpha = _parse_alpha_flag(args.alpha)
    values = _read_series(args.infile)
    try:
        params = PrivacyParams(alpha, args.tau)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    rng = np.random.default_rng(args.seed)
    released = privatize(values, params, rng)
    comment = f"privatized alpha={_alpha_slug(alpha)} tau={args.tau:g} seed={args.seed}"
    _io.write_series_csv(args.out, released, comment)
    return EXIT_OK


def cmd_estimate(args) -> int:
    alpha = _parse_alpha_flag(args.alpha)
    values = _read_series(args.infile)
    try:
        params = PrivacyParams(alpha, args.tau)
        family = ModelFamily(args.family, args.dmin, args.dmax)
        cov = debias(empirical_covariances(values), params)
        estimate, trace = select_model(cov, family, params, args.kappa)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    grid = np.linspace(0.0, np.pi, args.grid_size)
    _io.write_estimate_csv(f"{args.out_prefix}_estimate.csv", estimate)
    _io.write_trace_csv(f"{args.out_prefix}_trace.csv", trace)
    _io.write_density_csv(f"{args.out_prefix}_curve.csv", grid, estimate(grid))
    return EXIT_OK


def cmd_experiment(args) -> int:
    config, extras = load_config(args.config)
    out_dir = args.out_dir if args.out_dir is not None else extras["out_dir"]
    if out_dir is None:
        raise CliError(EXIT_USAGE, "an output directory is required (--out-dir or config out_dir)")
    verbosity = extras["verbosity"]
    os.makedirs(out_dir, exist_ok=True)
    if verbosity >= 1:
        total = len(config.lengths) * len(config.alphas)
        print(
            f"running {total} configurations x {config.replications} replications",
            file=sys.stderr,
        )
    reports, curves = run_experiment(config, n_jobs=args.jobs)
    if verbosity >= 1:
        for rep in reports:
            print(
                f"n={rep.n} alpha={_alpha_slug(rep.alpha)}: mean_risk={rep.mean_risk:.6g} "
                f"ci95={rep.ci95:.3g}",
                file=sys.stderr,
            )
    # all computation succeeded; only now touch the filesystem
    for curve in curves:
        name = f"curves_n{curve.n}_alpha{_alpha_slug(curve.alpha)}.csv"
        _io.write_curves_csv(os.path.join(out_dir, name), curve)
    _io.write_results_csv(os.path.join(out_dir, "results.csv"), reports)
    return EXIT_OK


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV_VAR)
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privspec",
        description="Spectral density estimation from locally private time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="draw one series from the test process")
    p_sim.add_argument("--n", type=int, required=True, help="series length")
    p_sim.add_argument("--seed", type=int, default=0, help="generator seed")
    p_sim.add_argument("--burn-in", dest="burn_in", type=int, default=2000)
    p_sim.add_argument("--config", default=None, help="optional JSON file with model parameters")
    p_sim.add_argument("--out", required=True, help="output series CSV")
    p_sim.set_defaults(func=cmd_simulate)

    p_priv = sub.add_parser("privatize", help="truncate and add Laplace noise")
    p_priv.add_argument("--in", dest="infile", required=True, help="input series CSV")
    p_priv.add_argument("--alpha", required=True, help="privacy level (number or 'inf')")
    p_priv.add_argument("--tau", type=float, required=True, help="truncation threshold")
    p_priv.add_argument("--seed", type=int, default=0)
    p_priv.add_argument("--out", required=True, help="output series CSV")
    p_priv.set_defaults(func=cmd_privatize)

    p_est = sub.add_parser("estimate", help="fit the projection estimator to a series")
    p_est.add_argument("--in", dest="infile", required=True, help="input series CSV")
    p_est.add_argument("--alpha", required=True, help="privacy level used for debiasing")
    p_est.add_argument("--tau", type=float, required=True)
    p_est.add_argument("--kappa", type=float, default=1.0)
    p_est.add_argument("--family", choices=["histogram", "fourier"], default="histogram")
    p_est.add_argument("--dmin", type=int, default=1)
    p_est.add_argument("--dmax", type=int, default=50)
    p_est.add_argument("--grid-size", dest="grid_size", type=int, default=8192)
    p_est.add_argument(
        "--out-prefix",
        dest="out_prefix",
        required=True,
        help="writes <prefix>_estimate.csv, <prefix>_trace.csv, <prefix>_curve.csv",
    )
    p_est.set_defaults(func=cmd_estimate)

    p_exp = sub.add_parser("experiment", help="run a Monte Carlo experiment grid")
    p_exp.add_argument("--config", required=True, help="experiment config JSON")
    p_exp.add_argument("--out-dir", dest="out_dir", default=None)
    p_exp.add_argument(
        "--jobs",
        type=int,
        default=_default_jobs(),
        help=f"parallel replication workers (default: ${JOBS_ENV_VAR} or 1)",
    )
    p_exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"privspec: error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"privspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"privspec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FloatingPointError, ZeroDivisionError, OverflowError, np.linalg.LinAlgError) as exc:
        print(f"privspec: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
