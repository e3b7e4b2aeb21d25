#src/metrics/roc.py
"""ROC analysis for thresholded regression outputs.

Continuous targets become activity labels via a user threshold
(`labels_from_threshold`); the ensemble's predictions serve as scores. The
curve sweeps every distinct score as a threshold, tied scores form a single
(diagonal) step, AUC is the trapezoidal area, and the Youden point is the
threshold maximizing tpr - fpr."""

from dataclasses import dataclass

import numpy as np
from sklearn import metrics

from src.core import as_finite_array
from src.errors import DataError, DimensionError


@dataclass(frozen=True)
class YoudenPoint:
    threshold: float
    j: float
    fpr: float
    tpr: float


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Curve points ordered by threshold descending, from (0, 0) to (1, 1).

    The first threshold is +inf (nothing classified positive)."""

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float
    youden: YoudenPoint

    @property
    def points(self):
        return list(zip(self.fpr.tolist(), self.tpr.tolist(), self.thresholds.tolist()))

    def summary(self):
        return {
            "auc": self.auc,
            "youden": {
                "threshold": self.youden.threshold,
                "j": self.youden.j,
                "fpr": self.youden.fpr,
                "tpr": self.youden.tpr,
            },
        }


def labels_from_threshold(values, threshold):
    """Activity labels: True where value >= threshold."""
    return as_finite_array(values, "values", 1) >= threshold


def _youden(fpr, tpr, thresholds):
    j = tpr - fpr
    # ties go to the lowest threshold, i.e. the last index along the curve
    best = int(np.flatnonzero(j == j.max())[-1])
    return YoudenPoint(float(thresholds[best]), float(j[best]), float(fpr[best]), float(tpr[best]))


def roc_curve(scores, labels):
    scores = as_finite_array(scores, "scores", 1)
    labels = np.asarray(labels, dtype=bool)
    if labels.shape != scores.shape:
        raise DimensionError(f"{labels.shape[0]} labels for {scores.shape[0]} scores")
    positives = int(labels.sum())
    if positives == 0 or positives == labels.shape[0]:
        raise DataError("ROC needs at least one positive and one negative label")

    # one point per distinct score; tied scores share a single diagonal step
    fpr, tpr, thresholds = metrics.roc_curve(labels, scores, drop_intermediate=False)
    fpr, tpr, thresholds = (np.asarray(a, dtype=float) for a in (fpr, tpr, thresholds))
    auc = float(metrics.auc(fpr, tpr))
    return RocCurve(fpr, tpr, thresholds, auc, _youden(fpr, tpr, thresholds))


@dataclass(frozen=True, eq=False)
class MeanRoc:
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float
    youden_fpr: float
    youden_tpr: float
    youden_j: float


def mean_roc(curves, grid_size=101):
    """Vertical average of repeated ROC curves on a shared FPR grid.

    Each curve contributes, at grid value f, its highest TPR among points with
    FPR <= f. Used to summarize repeated train/test experiments."""
    if not curves:
        raise DataError("mean_roc needs at least one curve")
    grid = np.linspace(0.0, 1.0, grid_size)
    stacked = []
    for curve in curves:
        last = np.searchsorted(curve.fpr, grid, side="right") - 1
        stacked.append(curve.tpr[last])
    tpr = np.mean(stacked, axis=0)
    j = tpr - grid
    best = int(np.argmax(j))
    return MeanRoc(
        fpr=grid,
        tpr=tpr,
        auc=float(metrics.auc(grid, tpr)),
        youden_fpr=float(grid[best]),
        youden_tpr=float(tpr[best]),
        youden_j=float(j[best]),
    )
