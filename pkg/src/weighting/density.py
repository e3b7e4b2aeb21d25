#src/weighting/density.py
"""Local density weights for the weighted RMSE.

A point's density value is the median Euclidean distance to its k nearest
neighbors, so large values mean sparse neighborhoods. Values above the mean
are truncated to the mean, then everything is divided by the maximum: points
at or below mean crowding get full weight 1, points inside clusters get less.

Neighbor search is brute force over row chunks (O(n^2 d) time, O(chunk * n)
memory), which keeps n around 2e4 tractable without an approximate index."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from src.core import PointWeights, as_finite_array
from src.errors import DataError, UsageError
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_CHUNK_ROWS = 512


@dataclass(frozen=True)
class DensityConfig:
    k: int = 20
    floor: float = 1e-6
    chunk_rows: int = DEFAULT_CHUNK_ROWS

    def __post_init__(self):
        if self.k < 1:
            raise UsageError(f"density k must be >= 1, got {self.k}")
        if not 0.0 < self.floor < 1.0:
            raise UsageError(f"density floor must lie in (0, 1), got {self.floor}")
        if self.chunk_rows < 1:
            raise UsageError(f"chunk_rows must be >= 1, got {self.chunk_rows}")


@dataclass(frozen=True, eq=False)
class DensityResult:
    raw_density: np.ndarray
    weights: PointWeights
    mean_density: float
    truncated_count: int


def knn_median_density(points, k, chunk_rows=DEFAULT_CHUNK_ROWS):
    """Median distance from each point to its min(k, n-1) nearest other points."""
    points = as_finite_array(points, "points", 2)
    n = points.shape[0]
    if n < 2:
        raise DataError(f"density needs at least 2 points, got {n}")
    neighbors = min(int(k), n - 1)

    density = np.empty(n)
    for start in range(0, n, chunk_rows):
        stop = min(n, start + chunk_rows)
        dist = cdist(points[start:stop], points)
        # exclude self by index, so exact duplicates still count as neighbors
        dist[np.arange(stop - start), np.arange(start, stop)] = np.inf
        nearest = np.partition(dist, neighbors - 1, axis=1)[:, :neighbors]
        density[start:stop] = np.median(nearest, axis=1)
    return density


def density_weights(points, config=None):
    config = config or DensityConfig()
    dens = knn_median_density(points, config.k, config.chunk_rows)

    # 1. Truncate at the (pre-truncation) mean
    mean = float(np.mean(dens))
    truncated_count = int(np.count_nonzero(dens > mean))
    clipped = np.minimum(dens, mean)

    # 2. Normalize by the maximum, then floor so no point drops out
    top = float(clipped.max())
    if top <= 0.0:
        raise DataError("all points coincide; density weighting is undefined, use uniform weights")
    beta = np.maximum(clipped / top, config.floor)

    logger.info(
        "[Density] n=%d k=%d mean=%.6g truncated=%d min_beta=%.3g",
        dens.shape[0], min(config.k, dens.shape[0] - 1), mean, truncated_count, beta.min(),
    )
    return DensityResult(
        raw_density=clipped,
        weights=PointWeights(beta),
        mean_density=mean,
        truncated_count=truncated_count,
    )
