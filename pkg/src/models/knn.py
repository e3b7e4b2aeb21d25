#src/models/knn.py
import numpy as np
from sklearn.neighbors import NearestNeighbors

from src.errors import ModelFitError, UsageError
from src.models.base import Regressor

WEIGHTINGS = ("uniform", "inverse_distance")


class KnnRegressor(Regressor):
    """k-nearest-neighbor average; equal distances are broken by training index.

    With inverse-distance weighting, a query that coincides with training
    points takes the mean of those coincident targets."""

    model_id = "knn"
    param_names = ("k_neighbors", "weighting")

    def __init__(self, k_neighbors=5, weighting="uniform", name=None):
        if k_neighbors < 1:
            raise UsageError(f"k_neighbors must be >= 1, got {k_neighbors}")
        if weighting not in WEIGHTINGS:
            raise UsageError(f"unknown kNN weighting '{weighting}', expected one of {WEIGHTINGS}")
        self.k_neighbors = int(k_neighbors)
        self.weighting = weighting
        super().__init__(name)

    def _fit(self, points, targets):
        if points.shape[0] < self.k_neighbors:
            raise ModelFitError(
                f"kNN '{self.name}' needs at least {self.k_neighbors} training points, got {points.shape[0]}",
                model_name=self.name,
            )
        # kd-tree distances are exact coordinate differences, so ties compare equal
        self._index = NearestNeighbors(algorithm="kd_tree").fit(points)
        self._targets = targets.copy()

    def _neighbors(self, points):
        # the tree orders tied neighbors arbitrarily: rank every training point
        # by (distance, index) and keep the first k
        dist, index = self._index.kneighbors(points, n_neighbors=self._targets.shape[0])
        order = np.lexsort((index, dist), axis=1)[:, : self.k_neighbors]
        return np.take_along_axis(dist, order, axis=1), np.take_along_axis(index, order, axis=1)

    def _predict(self, points):
        near_dist, near_index = self._neighbors(points)
        near_targets = self._targets[near_index]
        if self.weighting == "uniform":
            return near_targets.mean(axis=1)

        exact = near_dist == 0.0
        with np.errstate(divide="ignore"):
            weights = np.where(exact.any(axis=1, keepdims=True), exact.astype(float), 1.0 / near_dist)
        return (weights * near_targets).sum(axis=1) / weights.sum(axis=1)
