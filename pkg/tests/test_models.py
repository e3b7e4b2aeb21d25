import numpy as np
import pytest

from src.errors import DimensionError, ModelFitError, NotFittedError, UsageError
from src.models.knn import KnnRegressor
from src.models.rbf import KERNELS, RbfModel, correlation
from src.models.registry import MODEL_IDS, make_model, model_from_spec, parse_model_list
from src.models.ridge import RidgeRegressor


def _grid_points():
    axis = np.arange(4) * 2.0
    return np.array([[x, y] for x in axis for y in axis])


# --- RBF -----------------------------------------------------------------------

def test_rbf_two_point_interpolation():
    model = RbfModel("gaussian", shape=1.0).fit([[0.0, 0.0], [1.0, 1.0]], [0.0, 1.0])
    assert model.predict([[0.0, 0.0]])[0] == pytest.approx(0.0, abs=1e-6)
    assert model.predict([[1.0, 1.0]])[0] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("kernel", KERNELS)
def test_rbf_interpolates_training_data(kernel):
    points = _grid_points()
    targets = np.sin(points[:, 0]) + points[:, 1] ** 2
    model = RbfModel(kernel, shape=1.0, nugget=0.0).fit(points, targets)
    np.testing.assert_allclose(model.predict(points), targets, atol=1e-6)


@pytest.mark.parametrize("kernel", KERNELS)
def test_rbf_predictions_follow_target_shifts(kernel):
    points = _grid_points()
    targets = np.cos(points[:, 0]) * points[:, 1]
    queries = np.random.default_rng(0).uniform(0.0, 6.0, size=(10, 2))
    base = RbfModel(kernel).fit(points, targets).predict(queries)
    shifted = RbfModel(kernel).fit(points, targets + 4.0).predict(queries)
    np.testing.assert_allclose(shifted, base + 4.0, atol=1e-8)


def test_rbf_reverts_to_trend_far_away():
    points = _grid_points()
    model = RbfModel("exponential").fit(points, points.sum(axis=1))
    assert model.predict([[1e3, 1e3]])[0] == pytest.approx(model.trend, abs=1e-12)


def test_spline_correlation_profile():
    left = np.zeros((1, 1))
    right = np.array([[0.0], [0.2], [0.5], [1.0], [2.0]])
    values = correlation("spline", 1.0, left, right)[0]
    assert values[0] == 1.0
    assert values[1] == pytest.approx(0.64, abs=1e-12)
    assert values[2] == pytest.approx(1.25 * 0.5**3, abs=1e-12)
    assert values[3] == 0.0
    assert values[4] == 0.0


def test_rbf_rejects_unknown_kernel():
    with pytest.raises(UsageError):
        RbfModel("cubic")


# --- kNN -------------------------------------------------------------------------

def test_knn_single_neighbor_returns_training_target():
    points = np.random.default_rng(1).normal(size=(20, 3))
    targets = np.arange(20.0)
    model = KnnRegressor(k_neighbors=1).fit(points, targets)
    np.testing.assert_array_equal(model.predict(points), targets)


def test_knn_uniform_average():
    points = [[1.0, 0.0], [-0.5, np.sqrt(3) / 2], [-0.5, -np.sqrt(3) / 2]]
    model = KnnRegressor(k_neighbors=3).fit(points, [1.0, 2.0, 3.0])
    assert model.predict([[0.0, 0.0]])[0] == pytest.approx(2.0)


def test_knn_predictions_stay_within_target_range():
    rng = np.random.default_rng(2)
    points, targets = rng.normal(size=(40, 2)), rng.normal(size=40)
    for weighting in ("uniform", "inverse_distance"):
        predictions = KnnRegressor(5, weighting).fit(points, targets).predict(rng.normal(size=(30, 2)))
        assert predictions.min() >= targets.min() - 1e-12
        assert predictions.max() <= targets.max() + 1e-12


def test_knn_is_permutation_invariant():
    rng = np.random.default_rng(3)
    points, targets = rng.normal(size=(30, 2)), rng.normal(size=30)
    queries = rng.normal(size=(10, 2))
    order = rng.permutation(30)
    base = KnnRegressor(4).fit(points, targets).predict(queries)
    permuted = KnnRegressor(4).fit(points[order], targets[order]).predict(queries)
    np.testing.assert_allclose(permuted, base, rtol=1e-12, atol=1e-12)


def test_knn_ties_break_by_training_index():
    model = KnnRegressor(k_neighbors=1).fit([[-1.0], [1.0]], [5.0, 9.0])
    assert model.predict([[0.0]])[0] == 5.0


def test_knn_inverse_distance_exact_match():
    model = KnnRegressor(3, "inverse_distance").fit([[0.0], [1.0], [2.0]], [4.0, 6.0, 8.0])
    assert model.predict([[1.0]])[0] == 6.0


def test_knn_needs_enough_training_points():
    with pytest.raises(ModelFitError):
        KnnRegressor(k_neighbors=5).fit(np.zeros((3, 1)), np.zeros(3))


# --- ridge -----------------------------------------------------------------------

def test_ridge_recovers_line():
    x = np.arange(5.0)[:, None]
    model = RidgeRegressor(lam=0.0).fit(x, 2.0 * x[:, 0])
    assert model.coef[0] == pytest.approx(2.0, abs=1e-8)
    assert model.predict([[3.0]])[0] == pytest.approx(6.0, abs=1e-8)


def test_ridge_constant_targets():
    points = np.random.default_rng(4).normal(size=(10, 3))
    model = RidgeRegressor().fit(points, np.full(10, 5.0))
    np.testing.assert_allclose(model.predict(points), 5.0, atol=1e-9)


def test_ridge_collinear_features_fall_back_to_least_squares():
    x = np.arange(6.0)
    points = np.column_stack([x, 2 * x])
    model = RidgeRegressor(lam=0.0).fit(points, 3 * x + 1)
    np.testing.assert_allclose(model.predict(points), 3 * x + 1, atol=1e-8)


# --- base and registry -------------------------------------------------------------

@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_predict_before_fit_raises(model_id):
    with pytest.raises(NotFittedError):
        make_model(model_id).predict([[0.0]])


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_query_dimension_must_match(model_id):
    points = _grid_points()
    model = make_model(model_id).fit(points, points[:, 0])
    with pytest.raises(DimensionError):
        model.predict([[0.0, 0.0, 0.0]])


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_spec_round_trip_builds_equivalent_model(model_id):
    points = _grid_points()
    targets = points[:, 0] - points[:, 1]
    original = make_model(model_id, name="copy")
    rebuilt = model_from_spec(original.spec())
    assert rebuilt.spec() == original.spec()
    np.testing.assert_array_equal(
        rebuilt.fit(points, targets).predict(points), original.fit(points, targets).predict(points)
    )


def test_clone_is_unfitted_and_independent():
    model = KnnRegressor(2, name="near").fit([[0.0], [1.0]], [0.0, 1.0])
    twin = model.clone()
    assert not twin.is_fitted
    assert twin.name == "near"
    assert twin.params() == model.params()


def test_parse_model_list_numbers_duplicates():
    models = parse_model_list("knn, rbf-gaussian,knn")
    assert [model.name for model in models] == ["knn", "rbf-gaussian", "knn#2"]


def test_unknown_model_id():
    with pytest.raises(UsageError):
        make_model("svm")
    with pytest.raises(UsageError):
        parse_model_list(" , ")


def test_knn_equidistant_neighbors_resolved_by_index():
    corners = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]
    model = KnnRegressor(k_neighbors=2).fit(corners, [1.0, 2.0, 4.0, 8.0])
    assert model.predict([[0.0, 0.0]])[0] == 1.5


def test_ridge_matches_penalized_normal_equations():
    rng = np.random.default_rng(6)
    points = rng.normal(size=(25, 3))
    targets = points @ [1.0, -2.0, 0.5] + 3.0 + rng.normal(scale=0.1, size=25)
    model = RidgeRegressor(lam=2.0).fit(points, targets)

    X = points - points.mean(axis=0)
    y = targets - targets.mean()
    coef = np.linalg.solve(X.T @ X + 2.0 * np.eye(3), X.T @ y)
    np.testing.assert_allclose(model.coef, coef, rtol=1e-10)
    assert model.offset == pytest.approx(targets.mean() - points.mean(axis=0) @ coef, rel=1e-10)


def test_ridge_without_intercept_passes_through_origin():
    model = RidgeRegressor(lam=0.5, intercept=False).fit([[1.0], [2.0]], [2.0, 4.0])
    assert model.offset == 0.0
    # (1 + 4 + 0.5) w = 2 + 8
    assert model.coef[0] == pytest.approx(10.0 / 5.5, rel=1e-12)
