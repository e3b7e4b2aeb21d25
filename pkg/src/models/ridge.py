#src/models/ridge.py
from sklearn.linear_model import LinearRegression, Ridge

from src.errors import UsageError
from src.models.base import Regressor


class RidgeRegressor(Regressor):
    """Linear model with an L2 penalty lam on the coefficients.

    The intercept is not penalized. lam = 0 is ordinary least squares, which
    returns the minimum-norm solution for collinear features."""

    model_id = "ridge"
    param_names = ("lam", "intercept")

    def __init__(self, lam=1e-6, intercept=True, name=None):
        if lam < 0:
            raise UsageError(f"ridge lambda must be >= 0, got {lam}")
        self.lam = float(lam)
        self.intercept = bool(intercept)
        super().__init__(name)

    def _fit(self, points, targets):
        if self.lam == 0:
            estimator = LinearRegression(fit_intercept=self.intercept)
        else:
            estimator = Ridge(alpha=self.lam, fit_intercept=self.intercept, solver="svd")
        estimator.fit(points, targets)
        self.coef = estimator.coef_
        self.offset = float(estimator.intercept_)

    def _predict(self, points):
        return points @ self.coef + self.offset
