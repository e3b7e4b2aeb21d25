#src/metrics/errors.py
"""Regression error metrics: MSE, RMSE and the density-weighted RMSE."""

import numpy as np

from src.core import PointWeights, as_finite_array
from src.errors import DataError, DimensionError


def _residuals(predictions, targets):
    predictions = as_finite_array(predictions, "predictions", 1)
    targets = as_finite_array(targets, "targets", 1)
    if predictions.shape != targets.shape:
        raise DimensionError(
            f"{predictions.shape[0]} predictions for {targets.shape[0]} targets"
        )
    if predictions.size == 0:
        raise DataError("cannot score an empty prediction vector")
    return targets - predictions


def mse(predictions, targets):
    residuals = _residuals(predictions, targets)
    # np.sum uses pairwise summation
    return float(np.sum(np.square(residuals)) / residuals.shape[0])


def rmse(predictions, targets):
    """sqrt(1/n * sum (y_i - yhat_i)^2)."""
    return float(np.sqrt(mse(predictions, targets)))


def wrmse(predictions, targets, beta):
    """sqrt(1/n * sum (beta_i * (y_i - yhat_i))^2).

    With beta == 1 every scaled residual equals the plain residual bit for
    bit, so the result is identical to rmse()."""
    residuals = _residuals(predictions, targets)
    weights = beta.beta if isinstance(beta, PointWeights) else as_finite_array(beta, "beta", 1)
    if weights.shape != residuals.shape:
        raise DimensionError(f"{weights.shape[0]} weights for {residuals.shape[0]} residuals")
    scaled = weights * residuals
    return float(np.sqrt(np.sum(np.square(scaled)) / scaled.shape[0]))
