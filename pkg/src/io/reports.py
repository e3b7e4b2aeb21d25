#src/io/reports.py
"""WeightsReport JSON documents and their Markdown rendering for the audit log."""

import json

from src.core import make_weight_vector
from src.errors import DataError


def weights_report(report, config_echo, seeds, weighted, model_specs=None, extra=None):
    """JSON-ready dict for a FitReport. wrmse is null for unweighted fits."""
    payload = {
        "models": list(report.model_names),
        "alpha": [float(a) for a in report.alpha.alpha],
        "rmse": report.rmse,
        "wrmse": report.wrmse if weighted else None,
        "solver": report.solver.value,
        "iterations": report.iterations,
        "kkt_residual": report.kkt_residual,
        "converged": report.converged,
        "objective": report.objective,
        "ridge": report.ridge,
        "qp_scale": report.qp_scale,
        "active_models": list(report.active_models),
        "model_rmse": dict(zip(report.model_names, report.model_rmse)),
        "config_echo": config_echo,
        "seeds": seeds,
    }
    if model_specs is not None:
        payload["model_specs"] = model_specs
    if extra:
        payload.update(extra)
    return payload


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def read_json(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"cannot parse JSON {path}: {exc}") from None


def read_weights_report(path):
    """(payload, WeightVector) with the models/alpha alignment checked."""
    payload = read_json(path)
    try:
        models, alpha = payload["models"], payload["alpha"]
    except KeyError as exc:
        raise DataError(f"{path}: weights report lacks {exc}") from None
    if len(models) != len(alpha):
        raise DataError(f"{path}: {len(models)} models but {len(alpha)} weights")
    return payload, make_weight_vector(alpha)


def render_markdown(report, title="Ensemble Fit Report"):
    """Markdown summary: headline numbers plus one row per model."""
    kkt = "n/a" if report.kkt_residual is None else f"{report.kkt_residual:.3g}"
    md = [
        f"# {title}",
        f"**Solver:** {report.solver.value} | **Iterations:** {report.iterations} | "
        f"**Converged:** {report.converged} | **KKT residual:** {kkt}",
        f"**RMSE:** {report.rmse:.6g} | **wRMSE:** {report.wrmse:.6g}",
        "\n| Model | Alpha | Single-model RMSE | Active |",
        "| :--- | :--- | :--- | :--- |",
    ]
    active = set(report.active_models)
    for name, weight, single in zip(report.model_names, report.alpha.alpha, report.model_rmse):
        md.append(f"| {name} | {weight:.6f} | {single:.6g} | {'yes' if name in active else 'no'} |")
    return "\n".join(md)
