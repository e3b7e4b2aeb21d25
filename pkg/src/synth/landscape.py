#src/synth/landscape.py
"""Max-Set-of-Gaussians (MSG) test landscapes.

f(x) = max_k a_k * exp(-1/2 (x - mu_k)^T Sigma_k^-1 (x - mu_k))

Components are unnormalized bumps whose peak height is the amplitude, so the
global maximum is explicit: the largest amplitude (always exactly 1) at that
component's mean."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import ortho_group

from src.core import as_finite_array
from src.errors import DataError, DimensionError, UsageError
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_BOUNDS = (-5.0, 5.0)
EIGEN_RANGE = (0.05, 0.5)  # times the squared domain width


def resolve_bounds(dim, bounds=None):
    """(dim, 2) array of [low, high] rows; a single pair applies to every dimension."""
    bounds = np.array(DEFAULT_BOUNDS if bounds is None else bounds, dtype=float)
    if bounds.ndim == 1:
        bounds = np.tile(bounds, (dim, 1))
    if bounds.shape != (dim, 2):
        raise DimensionError(f"bounds must be a pair or a ({dim}, 2) array, got {bounds.shape}")
    if not np.all(bounds[:, 1] > bounds[:, 0]):
        raise UsageError("every domain bound needs low < high")
    return bounds


@dataclass(frozen=True, eq=False)
class GaussianComponent:
    mean: np.ndarray
    covariance: np.ndarray
    amplitude: float

    def __post_init__(self):
        mean = as_finite_array(self.mean, "component mean", 1)
        cov = as_finite_array(self.covariance, "component covariance", 2)
        if cov.shape != (mean.shape[0], mean.shape[0]):
            raise DimensionError(f"covariance shape {cov.shape} for a mean of length {mean.shape[0]}")
        if not np.allclose(cov, cov.T, rtol=1e-12, atol=0.0):
            raise DataError("component covariance must be symmetric")
        if self.amplitude <= 0:
            raise DataError(f"component amplitude must be > 0, got {self.amplitude}")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise DataError("component covariance must be positive definite") from None
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "precision", np.linalg.inv(cov))

    def evaluate(self, points):
        diff = points - self.mean
        quad = np.einsum("ij,jk,ik->i", diff, self.precision, diff)
        return self.amplitude * np.exp(-0.5 * quad)


@dataclass(frozen=True, eq=False)
class MsgLandscape:
    dim: int
    components: tuple
    bounds: np.ndarray

    def __post_init__(self):
        if not self.components:
            raise DataError("a landscape needs at least one component")
        for component in self.components:
            if component.mean.shape[0] != self.dim:
                raise DimensionError(f"component of dimension {component.mean.shape[0]} in a {self.dim}-D landscape")
        object.__setattr__(self, "bounds", resolve_bounds(self.dim, self.bounds))
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def max_amplitude(self):
        return max(component.amplitude for component in self.components)

    def to_dict(self):
        return {
            "dim": self.dim,
            "bounds": self.bounds.tolist(),
            "components": [
                {
                    "mean": component.mean.tolist(),
                    "covariance": component.covariance.tolist(),
                    "amplitude": component.amplitude,
                }
                for component in self.components
            ],
        }

    @classmethod
    def from_dict(cls, payload):
        components = tuple(
            GaussianComponent(np.array(item["mean"]), np.array(item["covariance"]), item["amplitude"])
            for item in payload["components"]
        )
        return cls(int(payload["dim"]), components, np.array(payload["bounds"]))


def _rotation(dim, rng):
    if dim == 1:
        return np.ones((1, 1))
    return ortho_group.rvs(dim, random_state=rng)


def generate_msg(dim, n_components, seed=0, bounds=None):
    if dim < 1 or n_components < 1:
        raise UsageError(f"need dim >= 1 and n_components >= 1, got {dim}, {n_components}")
    bounds = resolve_bounds(dim, bounds)
    rng = np.random.default_rng(seed)
    width_sq = float(np.mean(bounds[:, 1] - bounds[:, 0])) ** 2
    low, high = np.log(EIGEN_RANGE[0] * width_sq), np.log(EIGEN_RANGE[1] * width_sq)

    # 1. Means uniform in the domain, amplitudes in (0, 1] with the largest pinned to 1
    means = rng.uniform(bounds[:, 0], bounds[:, 1], size=(n_components, dim))
    amplitudes = 1.0 - rng.random(n_components)
    amplitudes[int(np.argmax(amplitudes))] = 1.0

    # 2. Covariances: random rotation times log-uniform eigenvalues
    components = []
    for k in range(n_components):
        rotation = _rotation(dim, rng)
        eigen = np.exp(rng.uniform(low, high, size=dim))
        cov = (rotation * eigen) @ rotation.T
        components.append(GaussianComponent(means[k], 0.5 * (cov + cov.T), amplitudes[k]))

    logger.info("[Synth] MSG landscape d=%d with %d components (seed %s)", dim, n_components, seed)
    return MsgLandscape(dim, tuple(components), bounds)


def evaluate_msg(landscape, points):
    points = as_finite_array(points, "points", 2)
    if points.shape[1] != landscape.dim:
        raise DimensionError(f"{points.shape[1]}-D points for a {landscape.dim}-D landscape")
    values = landscape.components[0].evaluate(points)
    for component in landscape.components[1:]:
        np.maximum(values, component.evaluate(points), out=values)
    return values
