import numpy as np
import pytest

from src.benchmark import replica_dataset, replica_models
from src.core import PredictionMatrix
from src.validation.cv import CvScheme, build_prediction_matrix


@pytest.fixture
def make_instance():
    """Random (PredictionMatrix, targets) with correlated, non-collinear columns."""
    def build(seed, n=160, s=3, noise=0.3):
        rng = np.random.default_rng(seed)
        truth = rng.normal(size=n)
        columns = truth[:, None] + rng.normal(scale=noise, size=(n, s)) + rng.normal(scale=0.2, size=s)
        names = tuple(f"m{j + 1}" for j in range(s))
        return PredictionMatrix(columns, names), truth
    return build


@pytest.fixture(scope="session")
def replica():
    """Seed-0 synthetic replica: the dataset and its LOO prediction matrix."""
    _, data = replica_dataset(0)
    matrix = build_prediction_matrix(data, replica_models(), CvScheme())
    return data, matrix
