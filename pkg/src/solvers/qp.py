#src/solvers/qp.py
"""Exact convex combination of models as a quadratic program over the simplex.

Minimizing (w)RMSE over the simplex is the same as minimizing
||A~ alpha - y~||^2 with A~ = diag(beta) A and y~ = diag(beta) y, because the
square root is strictly increasing. Expanded, that is

    1/2 alpha^T Q alpha + c^T alpha + 1/2 y~^T y~,   Q = A~^T A~,  c = -A~^T y~

Q is only s x s, so the whole problem is tiny once the prediction matrix is
built. The solver is accelerated projected gradient with the exact sort-based
simplex projection, function-value restarts, and a support polish step that
solves the equality-constrained KKT system once the active face is known."""

from dataclasses import dataclass

import numpy as np

from src.core import (
    NEGATIVE_SLACK,
    FitReport,
    PointWeights,
    PredictionMatrix,
    SolverKind,
    WeightVector,
    as_finite_array,
)
from src.errors import DataError, DimensionError, NumericalError, UsageError
from src.metrics.errors import rmse, wrmse
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEGENERACY_RATIO = 1e-12
AUTO_RIDGE_SCALE = 1e-10


@dataclass(frozen=True, eq=False)
class QpProblem:
    """Q, c and the data they were built from.

    `matrix`, `targets` and `weights` are kept so RMSE can be computed from
    the residual form instead of reconstructed from the quadratic."""

    Q: np.ndarray
    c: np.ndarray
    const_term: float
    n: int
    matrix: np.ndarray
    targets: np.ndarray
    model_names: tuple
    weights: np.ndarray = None
    ridge: float = 0.0

    @property
    def s(self):
        return self.Q.shape[0]

    def objective(self, alpha):
        """1/2 a^T Q a + c^T a (without the constant term)."""
        alpha = _values(alpha)
        return float(0.5 * alpha @ self.Q @ alpha + self.c @ alpha)

    def gradient(self, alpha):
        return self.Q @ _values(alpha) + self.c

    def squared_residual(self, alpha):
        """||A~ alpha - y~||^2 evaluated from the data, not from Q."""
        residual = self.matrix @ _values(alpha) - self.targets
        if self.weights is not None:
            residual = self.weights * residual
        return float(residual @ residual)

    def with_ridge(self, epsilon):
        """Same problem with epsilon * I added to Q."""
        return QpProblem(
            Q=self.Q + epsilon * np.eye(self.s),
            c=self.c,
            const_term=self.const_term,
            n=self.n,
            matrix=self.matrix,
            targets=self.targets,
            model_names=self.model_names,
            weights=self.weights,
            ridge=self.ridge + epsilon,
        )

    def scaled(self, factor):
        """Same minimizers with A~ and y~ divided by sqrt(factor), so Q and c shrink by factor."""
        root = np.sqrt(factor)
        return QpProblem(
            Q=self.Q / factor,
            c=self.c / factor,
            const_term=self.const_term / factor,
            n=self.n,
            matrix=self.matrix / root,
            targets=self.targets / root,
            model_names=self.model_names,
            weights=self.weights,
            ridge=self.ridge / factor,
        )


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 10000
    kkt_tolerance: float = 1e-8
    ridge_epsilon: float = 0.0
    polish: bool = True
    polish_interval: int = 25

    def __post_init__(self):
        if self.max_iterations < 1:
            raise UsageError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.kkt_tolerance < 0 or self.ridge_epsilon < 0:
            raise UsageError("solver tolerances must be non-negative")
        if self.polish_interval < 1:
            raise UsageError(f"polish_interval must be >= 1, got {self.polish_interval}")


def _values(alpha):
    return alpha.alpha if isinstance(alpha, WeightVector) else np.asarray(alpha, dtype=float)


def build_qp(A, y, beta=None):
    """Builds Q = A~^T A~, c = -A~^T y~, const = y~^T y~ with A~ = diag(beta) A."""
    if not isinstance(A, PredictionMatrix):
        raise DataError("build_qp expects a PredictionMatrix")
    targets = as_finite_array(y, "targets", 1)
    if targets.shape[0] != A.n:
        raise DimensionError(f"{targets.shape[0]} targets for {A.n} prediction rows")

    weights = None
    design, response = A.entries, targets
    if beta is not None:
        weights = beta.beta if isinstance(beta, PointWeights) else PointWeights(beta).beta
        if weights.shape[0] != A.n:
            raise DimensionError(f"{weights.shape[0]} point weights for {A.n} rows")
        design = A.entries * weights[:, None]
        response = weights * targets

    Q = design.T @ design
    Q = 0.5 * (Q + Q.T)
    c = -(design.T @ response)
    return QpProblem(
        Q=Q,
        c=c,
        const_term=float(response @ response),
        n=A.n,
        matrix=A.entries,
        targets=targets,
        model_names=A.model_names,
        weights=weights,
    )


def simplex_project(v):
    """Euclidean projection onto the probability simplex (sort-based, exact)."""
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    ind = np.arange(1, v.shape[0] + 1)
    rho = np.count_nonzero(u - cssv / ind > 0)
    tau = cssv[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def project_to_simplex(v):
    v = as_finite_array(v, "vector", 1)
    if v.size == 0:
        raise DataError("cannot project an empty vector")
    return WeightVector(simplex_project(v))


def _kkt(problem, alpha):
    return float(np.max(np.abs(alpha - simplex_project(alpha - problem.gradient(alpha)))))


def kkt_residual(problem, alpha):
    """||alpha - P(alpha - grad f(alpha))||_inf; zero exactly at optimal points."""
    values = _values(alpha)
    if values.shape != (problem.s,):
        raise DimensionError(f"{values.shape[0]} weights for a problem with s={problem.s}")
    return _kkt(problem, values)


def _curvature(Q):
    """(largest eigenvalue, singular?) for the PSD matrix Q."""
    eigenvalues = np.linalg.eigvalsh(Q)
    top = float(eigenvalues[-1])
    return top, top <= 0.0 or float(eigenvalues[0]) <= DEGENERACY_RATIO * top


def _polish(problem, alpha):
    """Solves the KKT system restricted to the support of alpha, or None."""
    support = np.flatnonzero(alpha > 0.0)
    k = support.shape[0]
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = problem.Q[np.ix_(support, support)]
    system[:k, k] = 1.0
    system[k, :k] = 1.0
    rhs = np.r_[-problem.c[support], 1.0]
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.isfinite(solution).all() or solution[:k].min() < -NEGATIVE_SLACK:
        return None
    candidate = np.zeros_like(alpha)
    candidate[support] = np.maximum(solution[:k], 0.0)
    return candidate / candidate.sum()


def summarize(problem, alpha, solver, iterations, kkt=None, converged=True, ridge=0.0, scale=1.0):
    """FitReport for `alpha` with RMSE taken from the residual form."""
    prediction = problem.matrix @ alpha.alpha
    plain = rmse(prediction, problem.targets)
    weighted = plain if problem.weights is None else wrmse(prediction, problem.targets, problem.weights)
    per_model = tuple(rmse(problem.matrix[:, j], problem.targets) for j in range(problem.s))
    return FitReport(
        alpha=alpha,
        rmse=plain,
        wrmse=weighted,
        solver=solver,
        iterations=iterations,
        model_names=problem.model_names,
        objective=problem.objective(alpha),
        kkt_residual=kkt,
        converged=converged,
        ridge=ridge,
        qp_scale=scale,
        model_rmse=per_model,
    )


def solve_qp(problem, config=None):
    config = config or SolverConfig()
    s = problem.s
    if s == 1:
        alpha = WeightVector(np.ones(1))
        return summarize(problem, alpha, SolverKind.QP, 0, kkt=_kkt(problem, alpha.alpha))

    # 1. Normalize so the mean diagonal of Q is 1; the KKT certificate below
    #    uses a unit gradient step and would otherwise depend on the data scale
    scale = float(np.trace(problem.Q)) / s
    if scale <= 0.0:
        scale = 1.0
    working = problem.scaled(scale)

    # 2. Curvature bound and degeneracy check
    top, degenerate = _curvature(working.Q)
    if degenerate:
        # AUTO_RIDGE_SCALE * trace(Q) / s in the original units
        epsilon = config.ridge_epsilon / scale if config.ridge_epsilon else AUTO_RIDGE_SCALE
        logger.info("[QP] Q is singular; adding ridge %.3g to pick the minimum-norm optimum", epsilon * scale)
        working = working.with_ridge(epsilon)
        top += epsilon
    step = 1.0 / (top * 1.01 if top > 0.0 else 1.0)

    # 3. Accelerated projected gradient from the simplex center
    x = np.full(s, 1.0 / s)
    y = x.copy()
    fx = working.objective(x)
    t = 1.0
    residual = _kkt(working, x)
    iterations = 0
    while residual > config.kkt_tolerance and iterations < config.max_iterations:
        iterations += 1
        x_new = simplex_project(y - step * working.gradient(y))
        f_new = working.objective(x_new)
        if f_new > fx:
            # non-monotone: restart momentum with a plain gradient step from x
            t = 1.0
            x_new = simplex_project(x - step * working.gradient(x))
            f_new = working.objective(x_new)
        if not np.isfinite(x_new).all() or not np.isfinite(f_new):
            raise NumericalError(f"non-finite iterate at iteration {iterations}")
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, fx, t = x_new, f_new, t_new
        residual = _kkt(working, x)

        if config.polish and residual > config.kkt_tolerance and iterations % config.polish_interval == 0:
            candidate = _polish(working, x)
            if candidate is not None:
                candidate_residual = _kkt(working, candidate)
                if candidate_residual < residual:
                    x, fx, residual = candidate, working.objective(candidate), candidate_residual
                    y, t = x.copy(), 1.0

    converged = residual <= config.kkt_tolerance
    if not converged:
        logger.warning(
            "[QP] no KKT certificate after %d iterations (residual %.3g > %.3g); returning best iterate",
            iterations, residual, config.kkt_tolerance,
        )
    logger.debug("[QP] s=%d iterations=%d kkt=%.3g", s, iterations, residual)

    return summarize(
        problem,
        WeightVector(x),
        SolverKind.QP,
        iterations,
        kkt=residual,
        converged=converged,
        ridge=working.ridge * scale,
        scale=scale,
    )


"""Notes on conventions:

    Sign of c: expanding ||A alpha - y||^2 gives alpha^T Q alpha - 2 y^T A alpha + y^T y,
    so the linear term is -A^T y. Writing +c^T alpha with c = A^T y would maximize
    agreement with the negated targets.

    Uniqueness: the optimum is unique only when Q is positive definite. Identical or
    collinear prediction columns make Q singular; the ridge then selects the
    minimum-norm optimal alpha, and the KKT residual is certified for the ridged
    problem that was actually solved (FitReport.ridge records the amount).

    Scale: multiplying A and y by a constant multiplies Q and c by its square and
    leaves the minimizer alone, while the floor that round-off puts under
    Q alpha + c grows with ||Q||. Solving Q / qp_scale keeps a fixed absolute
    tolerance meaningful for targets in any units."""
