#src/validation/cv.py
"""Cross-validation harness and the end-to-end ensemble pipeline.

build_prediction_matrix turns a dataset and a list of regressors into the
n x s matrix of out-of-fold predictions. fit_ensemble runs the whole chain:

    density weights -> prediction matrix -> QP -> solve (QP or ES) -> refit

Each stage labels its errors, so a failure reads "[cross-validation] ..." or
"[solve] ..." instead of a bare traceback from deep inside a model."""

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum

import numpy as np
from sklearn.model_selection import KFold, LeaveOneOut

from src.core import (
    ACTIVE_THRESHOLD,
    Dataset,
    PredictionMatrix,
    SolverKind,
    WeightVector,
    as_finite_array,
)
from src.errors import DataError, EnsembleError, ModelFitError, UsageError
from src.solvers.es import es_optimize
from src.solvers.qp import build_qp, solve_qp
from src.utils.logger import get_logger
from src.weighting.density import density_weights

logger = get_logger(__name__)


class CvKind(str, Enum):
    LEAVE_ONE_OUT = "leave_one_out"
    K_FOLD = "k_fold"


@dataclass(frozen=True)
class CvScheme:
    kind: CvKind = CvKind.LEAVE_ONE_OUT
    folds: int = 10
    shuffle_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", CvKind(self.kind))
        if self.kind is CvKind.K_FOLD and self.folds < 2:
            raise UsageError(f"k-fold needs at least 2 folds, got {self.folds}")

    @classmethod
    def parse(cls, text, shuffle_seed=0):
        """'loo' or 'k:<folds>'."""
        text = text.strip().lower()
        if text == "loo":
            return cls(CvKind.LEAVE_ONE_OUT, shuffle_seed=shuffle_seed)
        if text.startswith("k:"):
            try:
                folds = int(text[2:])
            except ValueError:
                raise UsageError(f"bad fold count in --cv '{text}'") from None
            return cls(CvKind.K_FOLD, folds=folds, shuffle_seed=shuffle_seed)
        raise UsageError(f"--cv must be 'loo' or 'k:<n>', got '{text}'")

    def describe(self):
        if self.kind is CvKind.LEAVE_ONE_OUT:
            return "loo"
        return f"k:{self.folds}:seed={self.shuffle_seed}"

    def validation_folds(self, n):
        """Sorted validation index arrays forming a partition of range(n)."""
        if self.kind is CvKind.LEAVE_ONE_OUT:
            if n < 2:
                raise DataError(f"leave-one-out needs n >= 2, got {n}")
            splitter = LeaveOneOut()
        else:
            if self.folds > n:
                raise DataError(f"{self.folds} folds for only {n} points")
            splitter = KFold(n_splits=self.folds, shuffle=True, random_state=self.shuffle_seed)
        return [np.sort(validation) for _, validation in splitter.split(np.arange(n))]


@contextmanager
def _stage(label):
    try:
        yield
    except EnsembleError as exc:
        exc.with_stage(label)
        raise


def _fit_fold(model, data, train, validation, fold):
    fitted = model.clone()
    try:
        fitted.fit(data.points[train], data.targets[train])
        return fitted.predict(data.points[validation])
    except (EnsembleError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise ModelFitError(
            f"model '{model.name}' failed on fold {fold}: {exc}", model_name=model.name, fold=fold
        ) from exc


def build_prediction_matrix(data, models, scheme=None, n_jobs=1):
    scheme = scheme or CvScheme()
    if not models:
        raise UsageError("need at least one model")
    folds = scheme.validation_folds(data.n)
    everything = np.arange(data.n)
    tasks = [
        (fold, j, np.setdiff1d(everything, validation), validation)
        for fold, validation in enumerate(folds)
        for j in range(len(models))
    ]

    def run(task):
        fold, j, train, validation = task
        return _fit_fold(models[j], data, train, validation, fold)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    # assemble by (fold, model) position; completion order does not matter
    entries = np.empty((data.n, len(models)))
    for (_, j, _, validation), predictions in zip(tasks, results):
        entries[validation, j] = predictions
    logger.info("[CV] %s over %d folds x %d models", scheme.describe(), len(folds), len(models))
    return PredictionMatrix(entries, tuple(model.name for model in models))


@dataclass(frozen=True, eq=False)
class FittedEnsemble:
    """Refitted active models and their renormalized weights."""

    models: tuple
    alpha: WeightVector

    @property
    def model_names(self):
        return tuple(model.name for model in self.models)

    def predict(self, points):
        predictions = np.column_stack([model.predict(points) for model in self.models])
        return predictions @ self.alpha.alpha


@dataclass(frozen=True, eq=False)
class EnsembleFit:
    report: object
    prediction_matrix: PredictionMatrix
    ensemble: FittedEnsemble = None
    density: object = None
    trace: object = None


def active_weights(alpha, threshold=ACTIVE_THRESHOLD):
    """Indices with alpha > threshold and their weights renormalized to sum 1."""
    keep = alpha.active(threshold)
    kept = alpha.alpha[keep]
    return keep, WeightVector(kept / kept.sum())


def optimize_weights(A, targets, beta=None, solver=SolverKind.QP, solver_config=None, es_config=None):
    """QP build + solve; returns (report, ES trace or None)."""
    with _stage("qp"):
        problem = build_qp(A, targets, beta)
    with _stage("solve"):
        if SolverKind(solver) is SolverKind.ES:
            trace = es_optimize(problem, es_config)
            return trace.best, trace
        return solve_qp(problem, solver_config), None


def fit_ensemble(
    data,
    models,
    scheme=None,
    weighting=None,
    solver=SolverKind.QP,
    solver_config=None,
    es_config=None,
    n_jobs=1,
    cache=None,
):
    scheme = scheme or CvScheme()
    if not isinstance(data, Dataset):
        raise DataError("fit_ensemble expects a Dataset")

    # 1. Density weights on the full point set (not per fold)
    density = None
    beta = None
    if weighting is not None:
        with _stage("density"):
            density = density_weights(data.points, weighting)
        beta = density.weights

    # 2. Out-of-fold predictions, from the cache when possible
    with _stage("cross-validation"):
        key = cache.fingerprint(data, models, scheme) if cache is not None else None
        matrix = cache.recall(key) if cache is not None else None
        if matrix is None:
            matrix = build_prediction_matrix(data, models, scheme, n_jobs=n_jobs)
            if cache is not None:
                cache.store(key, matrix)

    # 3./4. Quadratic program and solve
    report, trace = optimize_weights(matrix, data.targets, beta, solver, solver_config, es_config)

    # 5. Refit the models that carry weight on all the data
    with _stage("refit"):
        keep, alpha = active_weights(report.alpha)
        final = []
        for j in keep:
            final.append(models[j].clone().fit(data.points, data.targets))
    logger.info(
        "[CV] ensemble of %d/%d models, rmse=%.6g", len(final), len(models), report.rmse
    )
    return EnsembleFit(
        report=report,
        prediction_matrix=matrix,
        ensemble=FittedEnsemble(tuple(final), alpha),
        density=density,
        trace=trace,
    )


def fit_from_predictions(A, targets, points=None, weighting=None, solver=SolverKind.QP,
                         solver_config=None, es_config=None):
    """Same pipeline on a precomputed prediction matrix (no CV, no refit).

    `points` are only needed for density weighting."""
    targets = as_finite_array(targets, "targets", 1)
    density = None
    beta = None
    if weighting is not None:
        if points is None:
            raise UsageError("density weighting needs the feature points")
        with _stage("density"):
            density = density_weights(points, weighting)
        beta = density.weights
    report, trace = optimize_weights(A, targets, beta, solver, solver_config, es_config)
    return EnsembleFit(report=report, prediction_matrix=A, density=density, trace=trace)
