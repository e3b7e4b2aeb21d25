#src/solvers/es.py
"""(1+1)-Evolution Strategy with the 1/5th success rule, kept as the heuristic
baseline for the exact QP solver.

The ES optimizes the same quadratic objective as solve_qp, so any gap between
the two is solver quality, not pipeline noise. Offspring are repaired onto the
simplex by Euclidean projection."""

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from src.core import SolverKind, WeightVector
from src.errors import UsageError
from src.solvers.qp import simplex_project, summarize
from src.utils.logger import get_logger

logger = get_logger(__name__)

TARGET_SUCCESS_RATE = 0.2


@dataclass(frozen=True)
class EsConfig:
    budget: int = 2000
    initial_sigma: float = 0.25
    adaptation_interval: int = 20
    sigma_factor: float = 1.22
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise UsageError(f"ES budget must be >= 1, got {self.budget}")
        if self.initial_sigma <= 0:
            raise UsageError(f"initial_sigma must be > 0, got {self.initial_sigma}")
        if self.adaptation_interval < 1:
            raise UsageError(f"adaptation_interval must be >= 1, got {self.adaptation_interval}")
        if self.sigma_factor <= 1:
            raise UsageError(f"sigma_factor must be > 1, got {self.sigma_factor}")


class EsEvaluation(NamedTuple):
    alpha: WeightVector
    objective: float
    accepted: bool
    sigma: float


@dataclass(frozen=True, eq=False)
class EsTrace:
    evaluations: list = field(default_factory=list)
    best: object = None

    def objectives(self):
        return np.array([entry.objective for entry in self.evaluations])

    def write_csv(self, path):
        """(evaluation_index, alpha_1..alpha_s, objective, accepted, sigma) rows."""
        s = len(self.evaluations[0].alpha)
        header = ["evaluation_index", *[f"alpha_{j + 1}" for j in range(s)], "objective", "accepted", "sigma"]
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for index, entry in enumerate(self.evaluations):
                writer.writerow(
                    [index, *[repr(float(a)) for a in entry.alpha.alpha],
                     repr(entry.objective), int(entry.accepted), repr(entry.sigma)]
                )


def es_optimize(problem, config=None):
    config = config or EsConfig()
    rng = np.random.default_rng(config.seed)
    s = problem.s

    parent = np.full(s, 1.0 / s)
    f_parent = problem.objective(parent)
    sigma = config.initial_sigma
    evaluations = [EsEvaluation(WeightVector(parent), f_parent, True, sigma)]

    successes = 0
    generations = 0
    # a single-model simplex is one point; nothing to search
    while s > 1 and len(evaluations) < config.budget:
        child = simplex_project(parent + sigma * rng.standard_normal(s))
        f_child = problem.objective(child)
        accepted = f_child <= f_parent
        evaluations.append(EsEvaluation(WeightVector(child), f_child, accepted, sigma))
        if accepted:
            parent, f_parent = child, f_child
            successes += 1

        generations += 1
        if generations == config.adaptation_interval:
            rate = successes / generations
            if rate > TARGET_SUCCESS_RATE:
                sigma *= config.sigma_factor
            elif rate < TARGET_SUCCESS_RATE:
                sigma /= config.sigma_factor
            successes = 0
            generations = 0

    # elitist: the current parent is the best point seen
    best = summarize(problem, WeightVector(parent), SolverKind.ES, len(evaluations))
    logger.info(
        "[ES] %d evaluations, best objective %.6g, final sigma %.3g",
        len(evaluations), f_parent, sigma,
    )
    return EsTrace(evaluations=evaluations, best=best)
