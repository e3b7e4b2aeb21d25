#src/core.py
"""Shared data model: datasets, prediction matrices, simplex weight vectors,
per-point weights and fit reports.

All types are frozen dataclasses wrapping read-only numpy arrays, so a value
built once can be handed to any number of concurrent readers.

Orientation: a PredictionMatrix is n x s (rows are sample points, columns are
models). That is the only orientation for which the residual A @ alpha - y is
defined; an s x n layout with a_ij = f_j(x_i) mixes up its own indices."""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.errors import DataError, DimensionError, SimplexError

SUM_TOLERANCE = 1e-9
NEGATIVE_SLACK = 1e-12
ACTIVE_THRESHOLD = 1e-6


def _frozen(array):
    array.setflags(write=False)
    return array


def as_finite_array(values, name, ndim):
    """Copies `values` into a float64 array of the given rank, rejecting NaN/Inf."""
    array = np.array(values, dtype=float)
    if ndim == 2 and array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    if array.size and not np.isfinite(array).all():
        raise DataError(f"{name} contains non-finite entries")
    return array


class SolverKind(str, Enum):
    QP = "qp"
    ES = "es"


@dataclass(frozen=True, eq=False)
class Dataset:
    """n sample points in d dimensions with their objective values."""

    points: np.ndarray
    targets: np.ndarray
    feature_names: tuple = None

    def __post_init__(self):
        points = as_finite_array(self.points, "points", 2)
        targets = as_finite_array(self.targets, "targets", 1)
        if points.shape[0] < 1 or points.shape[1] < 1:
            raise DimensionError(f"dataset needs n >= 1 and d >= 1, got {points.shape}")
        if targets.shape[0] != points.shape[0]:
            raise DimensionError(
                f"{targets.shape[0]} targets for {points.shape[0]} point rows"
            )
        names = self.feature_names
        if names is not None:
            names = tuple(str(name) for name in names)
            if len(names) != points.shape[1]:
                raise DimensionError(
                    f"{len(names)} feature names for {points.shape[1]} columns"
                )
        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "targets", _frozen(targets))
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    def subset(self, indices):
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.points[indices], self.targets[indices], self.feature_names)


@dataclass(frozen=True, eq=False)
class PredictionMatrix:
    """Out-of-fold predictions: column j holds model j's predictions at the n points."""

    entries: np.ndarray
    model_names: tuple

    def __post_init__(self):
        entries = as_finite_array(self.entries, "prediction matrix", 2)
        names = tuple(str(name) for name in self.model_names)
        n, s = entries.shape
        if n < 1 or s < 1:
            raise DimensionError(f"prediction matrix needs n >= 1 and s >= 1, got {entries.shape}")
        if len(names) != s:
            raise DimensionError(f"{len(names)} model names for {s} columns")
        if len(set(names)) != len(names):
            raise DataError(f"model names must be unique, got {list(names)}")
        object.__setattr__(self, "entries", _frozen(entries))
        object.__setattr__(self, "model_names", names)

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def s(self):
        return self.entries.shape[1]

    def column(self, name):
        return self.entries[:, self.model_names.index(name)]

    def select(self, names):
        """Reorders / restricts columns to `names`."""
        missing = [name for name in names if name not in self.model_names]
        if missing:
            raise DataError(f"unknown model columns: {missing}")
        indices = [self.model_names.index(name) for name in names]
        return PredictionMatrix(self.entries[:, indices], tuple(names))


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Convex-combination coefficients on the probability simplex.

    Construction repairs floating-point slack: entries in [-1e-12, 0) are
    clamped to 0 and the vector is renormalized so it sums to 1."""

    alpha: np.ndarray

    def __post_init__(self):
        raw = as_finite_array(self.alpha, "weight vector", 1)
        if raw.size == 0:
            raise SimplexError("weight vector is empty")
        if raw.min() < -NEGATIVE_SLACK:
            raise SimplexError(f"negative weight {raw.min():.3g} beyond slack {NEGATIVE_SLACK}")
        total = math.fsum(raw)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise SimplexError(f"weights sum to {total!r}, not 1 within {SUM_TOLERANCE}")
        alpha = np.maximum(raw, 0.0)
        total = math.fsum(alpha)
        if total != 1.0:
            alpha = alpha / total
        object.__setattr__(self, "alpha", _frozen(alpha))

    def __len__(self):
        return self.alpha.shape[0]

    @classmethod
    def uniform(cls, s):
        return cls(np.full(s, 1.0 / s))

    @classmethod
    def corner(cls, s, j):
        alpha = np.zeros(s)
        alpha[j] = 1.0
        return cls(alpha)

    def active(self, threshold=ACTIVE_THRESHOLD):
        """Indices of the models carrying more than `threshold` weight."""
        return np.flatnonzero(self.alpha > threshold)


@dataclass(frozen=True, eq=False)
class PointWeights:
    """Per-point weights beta in (0, 1] for the weighted RMSE."""

    beta: np.ndarray

    def __post_init__(self):
        beta = as_finite_array(self.beta, "point weights", 1)
        if beta.size == 0:
            raise DataError("point weights are empty")
        if beta.min() <= 0.0 or beta.max() > 1.0:
            raise DataError(
                f"point weights must lie in (0, 1], got [{beta.min():.3g}, {beta.max():.3g}]"
            )
        object.__setattr__(self, "beta", _frozen(beta))

    def __len__(self):
        return self.beta.shape[0]

    @classmethod
    def uniform(cls, n):
        return cls(np.ones(n))


@dataclass(frozen=True, eq=False)
class FitReport:
    """What a solver run produced, with enough context to audit it.

    kkt_residual is measured on Q / qp_scale, where qp_scale is the mean
    diagonal of Q, so the certificate does not depend on the data units.
    ridge is in the units of the original Q."""

    alpha: WeightVector
    rmse: float
    wrmse: float
    solver: SolverKind
    iterations: int
    model_names: tuple
    objective: float
    kkt_residual: float = None
    converged: bool = True
    ridge: float = 0.0
    model_rmse: tuple = field(default_factory=tuple)
    qp_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "solver", SolverKind(self.solver))
        object.__setattr__(self, "model_names", tuple(self.model_names))
        if len(self.model_names) != len(self.alpha):
            raise DimensionError(
                f"{len(self.model_names)} model names for {len(self.alpha)} weights"
            )
        for label, value in (("rmse", self.rmse), ("wrmse", self.wrmse)):
            if not math.isfinite(value) or value < 0:
                raise DataError(f"{label} must be finite and non-negative, got {value!r}")
        if self.iterations < 0:
            raise DataError(f"iterations must be non-negative, got {self.iterations}")
        if (self.kkt_residual is not None) != (self.solver is SolverKind.QP):
            raise DataError("kkt_residual is reported for QP solves and only for them")

    @property
    def active_models(self):
        return tuple(self.model_names[j] for j in self.alpha.active())


def make_weight_vector(raw):
    """Validates `raw` against the simplex (with tolerance) and repairs the slack."""
    if isinstance(raw, WeightVector):
        raw = raw.alpha
    return WeightVector(raw)


def ensemble_predict(A, alpha):
    """Convex combination of the model columns: returns A @ alpha."""
    entries = A.entries if isinstance(A, PredictionMatrix) else np.asarray(A, dtype=float)
    weights = alpha.alpha if isinstance(alpha, WeightVector) else np.asarray(alpha, dtype=float)
    if entries.ndim != 2 or entries.shape[1] != weights.shape[0]:
        raise DimensionError(
            f"{weights.shape[0]} weights for a matrix with shape {entries.shape}"
        )
    return entries @ weights
