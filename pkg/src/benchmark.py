#src/benchmark.py
"""Synthetic replica sweep: exact QP against the (1+1)-ES on MSG landscapes.

Per seed: generate a d-dimensional MSG landscape, sample it on a Latin
Hypercube design, build leave-one-out predictions of the three RBF kernels,
then solve the same quadratic program with both solvers."""

import time
from dataclasses import dataclass

from src.core import Dataset
from src.models.rbf import KERNELS, RbfModel
from src.solvers.es import EsConfig, es_optimize
from src.solvers.qp import build_qp, solve_qp
from src.synth.landscape import evaluate_msg, generate_msg
from src.synth.sampling import latin_hypercube
from src.utils.logger import get_logger
from src.validation.cv import CvScheme, build_prediction_matrix

logger = get_logger(__name__)


@dataclass(frozen=True)
class ReplicaConfig:
    dim: int = 4
    components: int = 160
    samples: int = 160
    shape: float = 1.0
    budget: int = 2000


def replica_dataset(seed, config=None):
    config = config or ReplicaConfig()
    landscape = generate_msg(config.dim, config.components, seed=seed)
    points = latin_hypercube(config.samples, config.dim, seed=seed)
    return landscape, Dataset(points, evaluate_msg(landscape, points))


def replica_models(config=None):
    config = config or ReplicaConfig()
    return [RbfModel(kernel, shape=config.shape, name=f"rbf-{kernel}") for kernel in KERNELS]


def run_seed(seed, config=None, record_timings=False):
    """One row of the sweep."""
    config = config or ReplicaConfig()
    _, data = replica_dataset(seed, config)
    matrix = build_prediction_matrix(data, replica_models(config), CvScheme())
    problem = build_qp(matrix, data.targets)

    started = time.perf_counter()
    qp = solve_qp(problem)
    qp_seconds = time.perf_counter() - started

    started = time.perf_counter()
    es = es_optimize(problem, EsConfig(budget=config.budget, seed=seed)).best
    es_seconds = time.perf_counter() - started

    row = {
        "seed": seed,
        "qp_rmse": qp.rmse,
        "es_rmse": es.rmse,
        "rmse_gap": es.rmse - qp.rmse,
        "qp_objective": qp.objective,
        "es_objective": es.objective,
        "qp_kkt_residual": qp.kkt_residual,
        "qp_alpha": [float(a) for a in qp.alpha.alpha],
        "es_alpha": [float(a) for a in es.alpha.alpha],
        "best_single_rmse": min(qp.model_rmse),
    }
    if record_timings:
        row["qp_seconds"] = qp_seconds
        row["es_seconds"] = es_seconds
    logger.info("[Bench] seed %d: qp %.6g es %.6g gap %.3g", seed, qp.rmse, es.rmse, row["rmse_gap"])
    return row


def run_sweep(seeds, config=None, journal=None, record_timings=False):
    """Rows for every seed; seeds already in the journal are not recomputed."""
    done = journal.completed_seeds() if journal is not None else set()
    rows = {row["seed"]: row for row in (journal.rows if journal is not None else [])}
    for seed in seeds:
        if seed in done:
            logger.info("[Bench] seed %d already in journal, skipping", seed)
            continue
        row = run_seed(seed, config, record_timings)
        rows[seed] = row
        if journal is not None:
            journal.record(row)
    return [rows[seed] for seed in seeds]
