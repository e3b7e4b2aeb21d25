#src/models/rbf.py
"""Radial-basis interpolants with a constant trend (ordinary-Kriging style mean).

The model solves the augmented system

    [ R + nugget*I   1 ] [w ]   [y]
    [ 1^T            0 ] [mu] = [0]

and predicts r(x)^T w + mu. The trend mu makes predictions shift with the
targets (fit on y + c, predict + c) and is what predictions revert to far away
from the data.

Correlations (theta = shape):
    gaussian     exp(-theta r^2)
    exponential  exp(-theta r)
    spline       prod_j s(theta |x_j - x'_j|), s(xi) = 1 - 15 xi^2 + 30 xi^3 for xi <= 0.2,
                 1.25 (1 - xi)^3 for 0.2 < xi < 1, 0 beyond (compact support)."""

import numpy as np
from scipy.linalg import LinAlgError, solve
from scipy.spatial.distance import cdist

from src.errors import ModelFitError, UsageError
from src.models.base import Regressor

KERNELS = ("gaussian", "exponential", "spline")


def _spline(xi):
    out = np.zeros_like(xi)
    inner = xi <= 0.2
    middle = (xi > 0.2) & (xi < 1.0)
    out[inner] = 1.0 - 15.0 * xi[inner] ** 2 + 30.0 * xi[inner] ** 3
    out[middle] = 1.25 * (1.0 - xi[middle]) ** 3
    return out


def correlation(kernel, shape, left, right):
    """Correlation matrix between two point sets."""
    if kernel == "gaussian":
        return np.exp(-shape * cdist(left, right, "sqeuclidean"))
    if kernel == "exponential":
        return np.exp(-shape * cdist(left, right))
    # spline: product of per-dimension factors
    out = np.ones((left.shape[0], right.shape[0]))
    for j in range(left.shape[1]):
        out *= _spline(shape * np.abs(left[:, j, None] - right[None, :, j]))
    return out


class RbfModel(Regressor):
    param_names = ("kernel", "shape", "nugget")

    def __init__(self, kernel="gaussian", shape=1.0, nugget=1e-10, name=None):
        if kernel not in KERNELS:
            raise UsageError(f"unknown RBF kernel '{kernel}', expected one of {KERNELS}")
        if shape <= 0:
            raise UsageError(f"RBF shape must be > 0, got {shape}")
        if nugget < 0:
            raise UsageError(f"RBF nugget must be >= 0, got {nugget}")
        self.kernel = kernel
        self.shape = float(shape)
        self.nugget = float(nugget)
        self.model_id = f"rbf-{kernel}"
        super().__init__(name)

    def _fit(self, points, targets):
        n = points.shape[0]
        system = np.zeros((n + 1, n + 1))
        system[:n, :n] = correlation(self.kernel, self.shape, points, points)
        system[:n, :n] += self.nugget * np.eye(n)
        system[:n, n] = 1.0
        system[n, :n] = 1.0
        rhs = np.r_[targets, 0.0]
        try:
            solution = solve(system, rhs, assume_a="sym")
        except (LinAlgError, ValueError) as exc:
            raise ModelFitError(
                f"RBF kernel system is singular for '{self.name}': {exc}", model_name=self.name
            ) from exc
        if not np.isfinite(solution).all():
            raise ModelFitError(f"RBF kernel system is singular for '{self.name}'", model_name=self.name)
        self._centers = points.copy()
        self._weights = solution[:n]
        self.trend = float(solution[n])

    def _predict(self, points):
        return correlation(self.kernel, self.shape, points, self._centers) @ self._weights + self.trend
