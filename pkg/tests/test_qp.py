import time

import numpy as np
import pytest

from src.core import PredictionMatrix, SolverKind, WeightVector
from src.errors import DimensionError, UsageError
from src.metrics.errors import rmse, wrmse
from src.solvers.qp import (
    SolverConfig,
    build_qp,
    kkt_residual,
    project_to_simplex,
    simplex_project,
    solve_qp,
)


def _grid(step):
    m = round(1.0 / step)
    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    keep = i + j <= m
    return np.column_stack([i[keep], j[keep], m - i[keep] - j[keep]]) / m


def _objectives(problem, alphas):
    return 0.5 * np.einsum("ij,jk,ik->i", alphas, problem.Q, alphas) + alphas @ problem.c


# --- build_qp ----------------------------------------------------------------

def test_build_qp_identity_example():
    problem = build_qp(PredictionMatrix(np.eye(2), ("a", "b")), [1.0, 0.0])
    np.testing.assert_array_equal(problem.Q, np.eye(2))
    np.testing.assert_array_equal(problem.c, [-1.0, 0.0])
    assert problem.const_term == 1.0


def test_build_qp_rank_one_example():
    problem = build_qp(PredictionMatrix([[1.0, 3.0]], ("a", "b")), [2.0])
    np.testing.assert_array_equal(problem.Q, [[1.0, 3.0], [3.0, 9.0]])
    np.testing.assert_array_equal(problem.c, [-2.0, -6.0])


def test_build_qp_unit_weights_match_unweighted_bitwise(make_instance):
    A, y = make_instance(0)
    plain = build_qp(A, y)
    weighted = build_qp(A, y, np.ones(A.n))
    np.testing.assert_array_equal(plain.Q, weighted.Q)
    np.testing.assert_array_equal(plain.c, weighted.c)
    assert plain.const_term == weighted.const_term


def test_build_qp_is_symmetric_psd(make_instance):
    A, y = make_instance(1, s=5)
    problem = build_qp(A, y, np.random.default_rng(1).uniform(0.1, 1.0, A.n))
    np.testing.assert_array_equal(problem.Q, problem.Q.T)
    assert np.linalg.eigvalsh(problem.Q).min() >= -1e-9


def test_build_qp_dimension_mismatch():
    A = PredictionMatrix(np.ones((3, 2)), ("a", "b"))
    with pytest.raises(DimensionError):
        build_qp(A, [1.0, 2.0])
    with pytest.raises(DimensionError):
        build_qp(A, [1.0, 2.0, 3.0], np.ones(2))


def test_objective_plus_constant_is_half_squared_residual(make_instance):
    A, y = make_instance(2)
    beta = np.random.default_rng(2).uniform(0.2, 1.0, A.n)
    problem = build_qp(A, y, beta)
    for alpha in np.random.default_rng(3).dirichlet(np.ones(A.s), size=20):
        expected = 0.5 * problem.squared_residual(alpha)
        assert problem.objective(alpha) + 0.5 * problem.const_term == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_objective_is_convex_along_segments(make_instance):
    A, y = make_instance(4)
    rng = np.random.default_rng(4)
    for problem in (build_qp(A, y), build_qp(A, y, rng.uniform(0.05, 1.0, A.n))):
        for _ in range(1000):
            a, b = rng.dirichlet(np.ones(A.s), size=2)
            t = rng.random()
            mix = problem.objective(t * a + (1 - t) * b)
            bound = t * problem.objective(a) + (1 - t) * problem.objective(b)
            assert mix <= bound + 1e-12 * max(1.0, abs(bound))


# --- projection ----------------------------------------------------------------

@pytest.mark.parametrize(
    "v, expected",
    [
        ([0.3, 0.7], [0.3, 0.7]),
        ([2.0, 0.0], [1.0, 0.0]),
        ([0.5, 0.5, 0.5], [1 / 3, 1 / 3, 1 / 3]),
        ([-1.0, -1.0], [0.5, 0.5]),
    ],
)
def test_project_to_simplex_examples(v, expected):
    np.testing.assert_allclose(project_to_simplex(v).alpha, expected, rtol=0, atol=1e-15)


def test_projection_is_closest_simplex_point():
    rng = np.random.default_rng(5)
    for _ in range(50):
        v = rng.normal(scale=2.0, size=4)
        p = simplex_project(v)
        assert p.min() >= 0.0
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        candidates = rng.dirichlet(np.ones(4), size=200)
        assert np.linalg.norm(v - p) <= np.linalg.norm(v - candidates, axis=1).min() + 1e-12


# --- KKT residual ------------------------------------------------------------

def test_kkt_residual_examples():
    problem = build_qp(PredictionMatrix([[1.0, 3.0]], ("a", "b")), [2.0])
    assert kkt_residual(problem, WeightVector([0.5, 0.5])) == pytest.approx(0.0, abs=1e-15)
    assert kkt_residual(problem, WeightVector([1.0, 0.0])) == pytest.approx(1.0, abs=1e-12)


def test_kkt_residual_rejects_wrong_length():
    problem = build_qp(PredictionMatrix([[1.0, 3.0]], ("a", "b")), [2.0])
    with pytest.raises(DimensionError):
        kkt_residual(problem, WeightVector([1.0]))


# --- solve_qp ------------------------------------------------------------------

def test_solve_single_model():
    report = solve_qp(build_qp(PredictionMatrix([[1.0], [2.0]], ("only",)), [1.0, 1.0]))
    np.testing.assert_array_equal(report.alpha.alpha, [1.0])
    assert report.solver is SolverKind.QP
    assert report.kkt_residual == 0.0
    assert report.iterations == 0


def test_solve_prefers_exact_model():
    A = PredictionMatrix(np.column_stack([np.ones(3), 3 * np.ones(3)]), ("low", "high"))
    report = solve_qp(build_qp(A, np.ones(3)))
    np.testing.assert_allclose(report.alpha.alpha, [1.0, 0.0], atol=1e-8)
    assert report.rmse == pytest.approx(0.0, abs=1e-8)


def test_solve_interpolates_between_models():
    A = PredictionMatrix(np.column_stack([np.ones(3), 3 * np.ones(3)]), ("low", "high"))
    report = solve_qp(build_qp(A, 2 * np.ones(3)))
    np.testing.assert_allclose(report.alpha.alpha, [0.5, 0.5], atol=1e-8)
    assert report.rmse == pytest.approx(0.0, abs=1e-8)


def test_solve_collinear_single_point():
    report = solve_qp(build_qp(PredictionMatrix([[1.0, 3.0]], ("a", "b")), [2.0]))
    np.testing.assert_allclose(report.alpha.alpha, [0.5, 0.5], atol=1e-10)
    assert report.rmse == pytest.approx(0.0, abs=1e-9)
    assert report.converged


def test_solve_reports_certificate(make_instance):
    A, y = make_instance(6, s=4)
    report = solve_qp(build_qp(A, y))
    assert report.converged
    assert report.kkt_residual <= 1e-8
    assert report.rmse == pytest.approx(rmse(A.entries @ report.alpha.alpha, y), rel=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_solve_beats_fine_grid(make_instance, seed):
    A, y = make_instance(100 + seed)
    problem = build_qp(A, y)
    started = time.perf_counter()
    report = solve_qp(problem)
    assert time.perf_counter() - started < 0.05
    step = 0.005
    grid_best = _objectives(problem, _grid(step)).min()
    lipschitz = np.linalg.eigvalsh(problem.Q).max()
    assert report.objective <= grid_best + 1e-9 * max(1.0, abs(grid_best))
    assert report.objective >= grid_best - 10 * lipschitz * step**2


def test_solve_dominates_every_corner(make_instance):
    for seed in range(10):
        A, y = make_instance(200 + seed, s=4)
        report = solve_qp(build_qp(A, y))
        best_single = min(rmse(A.entries[:, j], y) for j in range(A.s))
        assert report.rmse <= best_single + 1e-9
        assert min(report.model_rmse) == pytest.approx(best_single, rel=1e-15)


def test_solve_minimizes_rmse_not_just_objective(make_instance):
    A, y = make_instance(7)
    problem = build_qp(A, y)
    report = solve_qp(problem)
    rng = np.random.default_rng(7)
    for alpha in rng.dirichlet(np.ones(A.s), size=500):
        assert report.rmse <= rmse(A.entries @ alpha, y) + 1e-9


def test_unit_point_weights_give_same_solution(make_instance):
    A, y = make_instance(8)
    plain = solve_qp(build_qp(A, y))
    weighted = solve_qp(build_qp(A, y, np.ones(A.n)))
    np.testing.assert_array_equal(plain.alpha.alpha, weighted.alpha.alpha)
    assert weighted.wrmse == plain.rmse


def test_point_weights_are_scale_invariant(make_instance):
    A, y = make_instance(9)
    beta = np.random.default_rng(9).uniform(0.2, 1.0, A.n)
    full = solve_qp(build_qp(A, y, beta))
    half = solve_qp(build_qp(A, y, 0.5 * beta))
    np.testing.assert_allclose(full.alpha.alpha, half.alpha.alpha, atol=1e-8)


def test_weighted_solve_reports_wrmse(make_instance):
    A, y = make_instance(10)
    beta = np.random.default_rng(10).uniform(0.2, 1.0, A.n)
    report = solve_qp(build_qp(A, y, beta))
    prediction = A.entries @ report.alpha.alpha
    assert report.wrmse == pytest.approx(wrmse(prediction, y, beta), rel=1e-12)
    assert report.rmse == pytest.approx(rmse(prediction, y), rel=1e-12)


def test_perturbing_the_optimum_breaks_the_certificate():
    A = PredictionMatrix(np.column_stack([np.ones(3), 3 * np.ones(3)]), ("low", "high"))
    problem = build_qp(A, 2 * np.ones(3))
    report = solve_qp(problem)
    nudged = report.alpha.alpha + np.array([1e-3, -1e-3])
    assert kkt_residual(problem, nudged) > 1e-4


def test_identical_columns_split_evenly():
    column = np.linspace(0.0, 1.0, 8)
    A = PredictionMatrix(np.column_stack([column, column]), ("left", "right"))
    report = solve_qp(build_qp(A, column + 0.1))
    np.testing.assert_allclose(report.alpha.alpha, [0.5, 0.5], atol=1e-10)
    assert report.ridge > 0.0
    assert report.converged


def test_iteration_cap_reports_non_convergence(make_instance):
    A, y = make_instance(11)
    report = solve_qp(build_qp(A, y), SolverConfig(max_iterations=1, polish=False))
    assert not report.converged
    assert report.iterations == 1
    assert report.kkt_residual > 1e-8
    assert report.alpha.alpha.sum() == pytest.approx(1.0, abs=1e-12)


def test_solve_is_deterministic(make_instance):
    A, y = make_instance(12, s=5)
    first = solve_qp(build_qp(A, y))
    second = solve_qp(build_qp(A, y))
    np.testing.assert_array_equal(first.alpha.alpha, second.alpha.alpha)
    assert first.iterations == second.iterations


def test_solver_config_validation():
    with pytest.raises(UsageError):
        SolverConfig(max_iterations=0)
    with pytest.raises(UsageError):
        SolverConfig(kkt_tolerance=-1.0)


def test_build_qp_worked_examples():
    single = build_qp(PredictionMatrix([[1.0], [1.0]], ("only",)), [1.0, 1.0])
    np.testing.assert_array_equal(single.Q, [[2.0]])
    np.testing.assert_array_equal(single.c, [-2.0])
    assert single.objective([1.0]) + 0.5 * single.const_term == 0.0

    pair = build_qp(PredictionMatrix([[1.0, 3.0], [1.0, 3.0]], ("a", "b")), [2.0, 2.0])
    np.testing.assert_array_equal(pair.Q, [[2.0, 6.0], [6.0, 18.0]])
    np.testing.assert_array_equal(pair.c, [-4.0, -12.0])


@pytest.mark.parametrize("v, expected", [([0.2, 0.8], [0.2, 0.8]), ([0.6, 0.6], [0.5, 0.5])])
def test_project_to_simplex_more_examples(v, expected):
    np.testing.assert_allclose(project_to_simplex(v).alpha, expected, rtol=0, atol=1e-15)


def test_both_models_under_predict_gives_vertex():
    report = solve_qp(build_qp(PredictionMatrix([[1.0, 2.0], [1.0, 2.0]], ("a", "b")), [3.0, 3.0]))
    np.testing.assert_allclose(report.alpha.alpha, [0.0, 1.0], atol=1e-8)
    assert report.rmse == pytest.approx(1.0, abs=1e-8)


def test_bracketing_models_interpolate_exactly():
    report = solve_qp(build_qp(PredictionMatrix([[1.0, 3.0]] * 3, ("a", "b")), [2.0] * 3))
    np.testing.assert_allclose(report.alpha.alpha, [0.5, 0.5], atol=1e-10)
    assert report.rmse == pytest.approx(0.0, abs=1e-9)


def test_asymmetric_bracket_hits_zero_error_weight():
    # yhat = (1, 5), y = 2: zero error at alpha_1 = (5 - 2) / (5 - 1)
    report = solve_qp(build_qp(PredictionMatrix([[1.0, 5.0]], ("a", "b")), [2.0]))
    np.testing.assert_allclose(report.alpha.alpha, [0.75, 0.25], atol=1e-9)
    assert report.rmse == pytest.approx(0.0, abs=1e-8)


def test_equal_predictions_make_objective_flat():
    problem = build_qp(PredictionMatrix([[2.0, 2.0]], ("a", "b")), [5.0])
    values = [problem.objective([t, 1.0 - t]) for t in np.linspace(0.0, 1.0, 11)]
    np.testing.assert_allclose(values, values[0], rtol=1e-14)
    assert solve_qp(problem).rmse == pytest.approx(3.0, rel=1e-12)


def test_objective_and_rmse_rank_points_identically(make_instance):
    A, y = make_instance(18)
    problem = build_qp(A, y)
    alphas = np.random.default_rng(18).dirichlet(np.ones(A.s), size=200)
    by_objective = np.argsort([problem.objective(a) for a in alphas], kind="stable")
    by_rmse = np.argsort([rmse(A.entries @ a, y) for a in alphas], kind="stable")
    np.testing.assert_array_equal(by_objective, by_rmse)


def _correlated_instance(factor, n=2000):
    rng = np.random.default_rng(21)
    signal = rng.normal(size=n)
    columns = np.column_stack([signal + rng.normal(scale=0.4, size=n) for _ in range(3)])
    targets = signal + rng.normal(scale=0.2, size=n)
    return PredictionMatrix(factor * columns, ("a", "b", "c")), factor * targets


@pytest.mark.parametrize("factor", [1e-3, 1e4, 1e5])
def test_certificate_does_not_depend_on_data_units(factor):
    reference = solve_qp(build_qp(*_correlated_instance(1.0)))
    report = solve_qp(build_qp(*_correlated_instance(factor)))
    assert report.converged
    assert report.iterations < 1000
    assert report.kkt_residual <= 1e-8
    np.testing.assert_allclose(report.alpha.alpha, reference.alpha.alpha, atol=1e-6)
    assert report.qp_scale == pytest.approx(factor**2 * reference.qp_scale, rel=1e-10)
    assert report.rmse == pytest.approx(factor * reference.rmse, rel=1e-8)


@pytest.mark.parametrize("factor", [1e-6, 1.0, 1e3])
def test_automatic_ridge_follows_the_trace(factor):
    column = factor * np.linspace(0.0, 1.0, 8)
    problem = build_qp(PredictionMatrix(np.column_stack([column, column]), ("left", "right")), column)
    report = solve_qp(problem)
    assert report.ridge == pytest.approx(1e-10 * np.trace(problem.Q) / 2, rel=1e-12)
    np.testing.assert_allclose(report.alpha.alpha, [0.5, 0.5], atol=1e-10)


def test_explicit_ridge_is_kept_in_original_units():
    column = 50.0 * np.linspace(0.0, 1.0, 8)
    problem = build_qp(PredictionMatrix(np.column_stack([column, column]), ("left", "right")), column)
    assert solve_qp(problem, SolverConfig(ridge_epsilon=1e-6)).ridge == pytest.approx(1e-6, rel=1e-12)
