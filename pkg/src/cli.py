#src/cli.py
"""Command-line surface: fit, density, synth, ternary, eval, benchmark.

JSON for reports, CSV for tables and plot data. Exit codes: 0 success,
2 usage error, 3 data error, 4 solver non-convergence (the report is still
written), 5 time limit exceeded. Errors print one JSON line to stderr."""

import argparse
import json
import os
import sys

import numpy as np

from src.benchmark import ReplicaConfig, run_sweep
from src.core import SolverKind, ensemble_predict
from src.errors import ConvergenceError, DataError, EnsembleError, UsageError
from src.io.reports import read_weights_report, render_markdown, weights_report, write_json
from src.io.tables import (
    read_dataset,
    read_point_weights,
    read_points,
    read_predictions,
    write_dataset,
    write_table,
)
from src.memory.journal import SweepJournal
from src.memory.persistence import PredictionCache
from src.metrics.errors import rmse, wrmse
from src.metrics.roc import labels_from_threshold, roc_curve
from src.models.registry import MODEL_IDS, model_from_spec, parse_model_list
from src.solvers.es import EsConfig
from src.solvers.qp import SolverConfig, build_qp, solve_qp
from src.synth.landscape import evaluate_msg, generate_msg
from src.synth.sampling import latin_hypercube
from src.utils.logger import AuditLogger, configure_console, get_logger
from src.utils.watchdog import run_with_limit
from src.validation.cv import (
    CvScheme,
    FittedEnsemble,
    active_weights,
    fit_ensemble,
    fit_from_predictions,
)
from src.weighting.density import DensityConfig, density_weights

logger = get_logger(__name__)


def _echo(args):
    """Resolved flags as a JSON-ready dict."""
    return {key: value for key, value in sorted(vars(args).items()) if key not in ("func", "verbose")}


def _density_config(args):
    if args.weighting == "none":
        return None
    return DensityConfig(k=args.density_k, floor=args.density_floor)


def _roc_summary(scores, targets, threshold):
    return roc_curve(scores, labels_from_threshold(targets, threshold)).summary()


# --- fit -------------------------------------------------------------------

def _fit_inputs(args):
    """Loads whichever inputs the flags name; returns (data, A, targets)."""
    data = read_dataset(args.data, args.target) if args.data else None
    if args.predictions is None:
        if data is None:
            raise UsageError("--models needs --data")
        return data, None, data.targets
    A, targets = read_predictions(args.predictions, target=args.target)
    if targets is None:
        if data is None:
            raise DataError(f"target column '{args.target}' is in neither --predictions nor --data")
        targets = data.targets
    return data, A, targets


def cmd_fit(args):
    weighting = _density_config(args)
    solver = SolverKind(args.solver)
    solver_config = SolverConfig(
        max_iterations=args.max_iterations, kkt_tolerance=args.kkt_tolerance
    )
    es_config = EsConfig(budget=args.budget, seed=args.seed)
    data, A, targets = _fit_inputs(args)

    models = None
    if A is None:
        models = parse_model_list(args.models)
        scheme = CvScheme.parse(args.cv, shuffle_seed=args.seed)
        cache = PredictionCache(args.cache) if args.cache else None
        fit = run_with_limit(
            args.time_limit, fit_ensemble, data, models, scheme, weighting, solver,
            solver_config, es_config, args.jobs, cache,
        )
    else:
        points = data.points if data is not None else None
        fit = run_with_limit(
            args.time_limit, fit_from_predictions, A, targets, points, weighting, solver,
            solver_config, es_config,
        )
    report = fit.report

    extra = {}
    if args.roc_threshold is not None:
        scores = ensemble_predict(fit.prediction_matrix, report.alpha)
        extra["cv_roc"] = _roc_summary(scores, targets, args.roc_threshold)
    if args.test_file:
        if A is not None:
            test_matrix, test_targets = read_predictions(
                args.test_file, target=args.target, model_names=A.model_names
            )
            if test_targets is None:
                raise DataError(f"{args.test_file}: target column '{args.target}' not found")
            test_predictions = ensemble_predict(test_matrix, report.alpha)
        else:
            test = read_dataset(args.test_file, args.target, features=data.feature_names)
            test_targets = test.targets
            test_predictions = fit.ensemble.predict(test.points)
        extra["test"] = {"n": int(test_targets.shape[0]), "rmse": rmse(test_predictions, test_targets)}
        if args.roc_threshold is not None:
            extra["test"]["roc"] = _roc_summary(test_predictions, test_targets, args.roc_threshold)

    payload = weights_report(
        report,
        config_echo=_echo(args),
        seeds={"seed": args.seed, "cv_shuffle": args.seed, "es": args.seed},
        weighted=weighting is not None,
        model_specs=[model.spec() for model in models] if models else None,
        extra=extra,
    )
    write_json(args.out, payload)
    if args.trace_out and fit.trace is not None:
        fit.trace.write_csv(args.trace_out)
    if args.audit_dir:
        audit = AuditLogger(args.audit_dir)
        audit.log_snapshot(render_markdown(report), "FIT" if report.converged else "NON_CONVERGED")
        audit.close()

    if not report.converged:
        logger.warning("[CLI] report written to %s without a KKT certificate", args.out)
        return ConvergenceError.exit_code
    return 0


# --- density ---------------------------------------------------------------

def cmd_density(args):
    exclude = [args.target] if args.target else []
    points = read_points(args.data, exclude=exclude)
    result = density_weights(points, DensityConfig(k=args.density_k, floor=args.density_floor))
    write_table(args.out, {
        "index": np.arange(points.shape[0]),
        "raw_density": result.raw_density,
        "beta": result.weights.beta,
    })
    return 0


# --- synth -----------------------------------------------------------------

def cmd_synth(args):
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1, got {args.samples}")
    bounds = (args.low, args.high)
    landscape = generate_msg(args.dim, args.components, seed=args.seed, bounds=bounds)
    points = latin_hypercube(args.samples, args.dim, seed=args.seed, bounds=bounds)
    write_dataset(args.out, points, evaluate_msg(landscape, points))
    landscape_out = args.landscape_out or f"{os.path.splitext(args.out)[0]}.json"
    write_json(landscape_out, {"seed": args.seed, "samples": args.samples, "landscape": landscape.to_dict()})
    return 0


# --- ternary ---------------------------------------------------------------

def barycentric_grid(step):
    """All (a1, a2, a3) with denominators 1/step, a1 then a2 ascending."""
    m = round(1.0 / step)
    if m < 1 or abs(m * step - 1.0) > 1e-9:
        raise UsageError(f"--step must divide 1 evenly, got {step}")
    return [(i / m, j / m, (m - i - j) / m) for i in range(m + 1) for j in range(m + 1 - i)]


def cmd_ternary(args):
    A, targets = read_predictions(args.predictions, target=args.target)
    if targets is None:
        raise DataError(f"{args.predictions}: target column '{args.target}' not found")
    if A.s != 3:
        raise DataError(f"ternary grid needs exactly 3 model columns, got {A.s}")
    beta = None
    if args.weighting == "density":
        if not args.data:
            raise UsageError("--weighting density needs --data")
        points = read_points(args.data, exclude=[args.target])
        beta = density_weights(points, DensityConfig(k=args.density_k, floor=args.density_floor)).weights
    problem = build_qp(A, targets, beta)

    grid = barycentric_grid(args.step)
    optimum = solve_qp(problem)
    rows = grid + [tuple(float(a) for a in optimum.alpha.alpha)]
    predictions = [A.entries @ np.array(row) for row in rows]
    columns = {
        "alpha1": [row[0] for row in rows],
        "alpha2": [row[1] for row in rows],
        "alpha3": [row[2] for row in rows],
        "rmse": [rmse(prediction, targets) for prediction in predictions],
    }
    if beta is not None:
        columns["wrmse"] = [wrmse(prediction, targets, beta) for prediction in predictions]
    columns["kind"] = ["grid"] * len(grid) + ["optimum"]
    write_table(args.out, columns)
    return 0


# --- eval ------------------------------------------------------------------

def cmd_eval(args):
    payload, alpha = read_weights_report(args.weights)
    names = payload["models"]
    echo = payload.get("config_echo", {})
    target = args.target or echo.get("target")
    if not target:
        raise UsageError("--target is required when the report does not record one")

    if args.predictions:
        A, targets = read_predictions(args.predictions, target=target, model_names=names)
        if targets is None:
            if not args.data:
                raise DataError(f"target column '{target}' is in neither --predictions nor --data")
            targets = read_dataset(args.data, target).targets
        predictions = ensemble_predict(A, alpha)
    else:
        specs = payload.get("model_specs")
        if not specs or not echo.get("data"):
            raise DataError("report has no model specs or training data; pass --predictions")
        if not args.data:
            raise UsageError("--data is required without --predictions")
        training = read_dataset(echo["data"], target)
        data = read_dataset(args.data, target, features=training.feature_names)
        keep, weights = active_weights(alpha)
        models = tuple(model_from_spec(specs[j]).fit(training.points, training.targets) for j in keep)
        predictions = FittedEnsemble(models, weights).predict(data.points)
        targets = data.targets

    metrics = {"n": int(targets.shape[0]), "rmse": rmse(predictions, targets), "wrmse": None}
    if args.point_weights:
        metrics["wrmse"] = wrmse(predictions, targets, read_point_weights(args.point_weights))
    if args.roc_threshold is not None:
        metrics["roc"] = _roc_summary(predictions, targets, args.roc_threshold)
    write_json(args.out, metrics)
    if args.pairs_out:
        write_table(args.pairs_out, {"actual": targets, "predicted": predictions})
    return 0


# --- benchmark -------------------------------------------------------------

def cmd_benchmark(args):
    config = ReplicaConfig(
        dim=args.dim, components=args.components, samples=args.samples,
        shape=args.shape, budget=args.budget,
    )
    journal = SweepJournal(args.journal) if args.journal else None
    if journal is not None and journal.rows:
        logger.info("[CLI] %s", journal.resume_summary())
    seeds = list(range(args.seed, args.seed + args.seeds))
    rows = run_sweep(seeds, config, journal, record_timings=args.record_timings)

    columns = {}
    for key in rows[0]:
        if key.endswith("_alpha"):
            for j in range(len(rows[0][key])):
                columns[f"{key}_{j + 1}"] = [row[key][j] for row in rows]
        else:
            columns[key] = [row[key] for row in rows]
    write_table(args.out, columns)
    gaps = np.array(columns["rmse_gap"])
    summary = {
        "seeds": len(rows),
        "es_never_better": bool(np.all(gaps >= -1e-9)),
        "within_1e-3": float(np.mean(gaps <= 1e-3)),
    }
    sys.stdout.write(json.dumps(summary) + "\n")
    return 0


# --- parser ----------------------------------------------------------------

def _add_density_flags(parser):
    parser.add_argument("--density-k", type=int, default=20)
    parser.add_argument("--density-floor", type=float, default=1e-6)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="convex-ensemble",
        description="Optimal convex combinations of regression models.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    fit = commands.add_parser("fit", help="optimize ensemble weights")
    fit.add_argument("--data")
    fit.add_argument("--target", required=True)
    source = fit.add_mutually_exclusive_group(required=True)
    source.add_argument("--models", help=f"comma-separated ids from {', '.join(MODEL_IDS)}")
    source.add_argument("--predictions", help="CSV of precomputed model predictions")
    fit.add_argument("--cv", default="loo", help="'loo' or 'k:<folds>'")
    fit.add_argument("--weighting", choices=("none", "density"), default="none")
    _add_density_flags(fit)
    fit.add_argument("--solver", choices=("qp", "es"), default="qp")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--budget", type=int, default=2000, help="ES evaluation budget")
    fit.add_argument("--max-iterations", type=int, default=10000)
    fit.add_argument("--kkt-tolerance", type=float, default=1e-8)
    fit.add_argument("--out", required=True)
    fit.add_argument("--test-file")
    fit.add_argument("--roc-threshold", type=float)
    fit.add_argument("--trace-out", help="ES trace CSV")
    fit.add_argument("--cache", help="SQLite prediction-matrix cache")
    fit.add_argument("--audit-dir", help="directory for the Markdown audit log")
    fit.add_argument("--time-limit", type=float, help="seconds before the fit is terminated")
    fit.add_argument("--jobs", type=int, default=1)
    fit.set_defaults(func=cmd_fit)

    density = commands.add_parser("density", help="per-point density weights")
    density.add_argument("--data", required=True)
    density.add_argument("--target", help="column to exclude from the coordinates")
    _add_density_flags(density)
    density.add_argument("--out", required=True)
    density.set_defaults(func=cmd_density)

    synth = commands.add_parser("synth", help="sample an MSG landscape on a Latin Hypercube")
    synth.add_argument("--dim", type=int, required=True)
    synth.add_argument("--components", type=int, required=True)
    synth.add_argument("--samples", type=int, required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--low", type=float, default=-5.0)
    synth.add_argument("--high", type=float, default=5.0)
    synth.add_argument("--out", required=True)
    synth.add_argument("--landscape-out")
    synth.set_defaults(func=cmd_synth)

    ternary = commands.add_parser("ternary", help="RMSE on a barycentric grid over 3 models")
    ternary.add_argument("--predictions", required=True)
    ternary.add_argument("--target", required=True)
    ternary.add_argument("--step", type=float, default=0.01)
    ternary.add_argument("--data", help="feature CSV for density weighting")
    ternary.add_argument("--weighting", choices=("none", "density"), default="none")
    _add_density_flags(ternary)
    ternary.add_argument("--seed", type=int, default=0)
    ternary.add_argument("--out", required=True)
    ternary.set_defaults(func=cmd_ternary)

    evaluate = commands.add_parser("eval", help="score a saved weights report")
    evaluate.add_argument("--weights", required=True)
    evaluate.add_argument("--data")
    evaluate.add_argument("--predictions")
    evaluate.add_argument("--target")
    evaluate.add_argument("--point-weights", help="CSV with a 'beta' column")
    evaluate.add_argument("--roc-threshold", type=float)
    evaluate.add_argument("--out", required=True)
    evaluate.add_argument("--pairs-out", help="(actual, predicted) CSV")
    evaluate.set_defaults(func=cmd_eval)

    bench = commands.add_parser("benchmark", help="QP vs ES sweep on the synthetic replica")
    bench.add_argument("--seeds", type=int, default=20)
    bench.add_argument("--seed", type=int, default=0, help="first seed")
    bench.add_argument("--dim", type=int, default=4)
    bench.add_argument("--components", type=int, default=160)
    bench.add_argument("--samples", type=int, default=160)
    bench.add_argument("--shape", type=float, default=1.0)
    bench.add_argument("--budget", type=int, default=2000)
    bench.add_argument("--journal", help="JSON journal for resuming")
    bench.add_argument("--record-timings", action="store_true")
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_console(args.verbose)
    try:
        return args.func(args)
    except EnsembleError as exc:
        sys.stderr.write(json.dumps({
            "error": exc.category, "stage": exc.stage, "message": str(exc),
        }) + "\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io", "stage": None, "message": str(exc)}) + "\n")
        return DataError.exit_code
