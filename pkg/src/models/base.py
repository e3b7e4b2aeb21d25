#src/models/base.py
"""Regressor interface shared by the model zoo and the CV harness."""

from abc import ABC, abstractmethod

from src.core import as_finite_array
from src.errors import DimensionError, NotFittedError


class Regressor(ABC):
    """fit(points, targets) -> self; predict(points) -> vector.

    Subclasses list their hyperparameters in `param_names`; `clone()` builds a
    fresh unfitted copy from them, which is how the CV harness gets one
    independent instance per fold."""

    model_id = "regressor"
    param_names = ()

    def __init__(self, name=None):
        self.name = name or self.model_id
        self._dim = None

    def params(self):
        return {key: getattr(self, key) for key in self.param_names}

    def spec(self):
        """Serializable identity: id, display name and hyperparameters."""
        return {"id": self.model_id, "name": self.name, "params": self.params()}

    def clone(self):
        return type(self)(name=self.name, **self.params())

    @property
    def is_fitted(self):
        return self._dim is not None

    def fit(self, points, targets):
        points = as_finite_array(points, "training points", 2)
        targets = as_finite_array(targets, "training targets", 1)
        if points.shape[0] != targets.shape[0]:
            raise DimensionError(f"{targets.shape[0]} targets for {points.shape[0]} points")
        self._fit(points, targets)
        self._dim = points.shape[1]
        return self

    def predict(self, points):
        if not self.is_fitted:
            raise NotFittedError(f"model '{self.name}' must be fitted before predict()")
        points = as_finite_array(points, "query points", 2)
        if points.shape[1] != self._dim:
            raise DimensionError(
                f"model '{self.name}' was fitted on d={self._dim}, queried with d={points.shape[1]}"
            )
        return self._predict(points)

    @abstractmethod
    def _fit(self, points, targets):
        ...

    @abstractmethod
    def _predict(self, points):
        ...

    def __repr__(self):
        args = ", ".join(f"{key}={value!r}" for key, value in self.params().items())
        return f"{type(self).__name__}(name={self.name!r}, {args})"
