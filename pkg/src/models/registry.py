#src/models/registry.py
"""String identifiers -> model instances, as used by the CLI's --models flag.

A model list like "rbf-gaussian,knn,ridge" becomes one instance each; a
repeated id gets a numbered display name ("knn", "knn#2") so prediction
columns stay unique."""

from src.errors import UsageError
from src.models.knn import KnnRegressor
from src.models.rbf import RbfModel
from src.models.ridge import RidgeRegressor

MODEL_IDS = ("rbf-gaussian", "rbf-exponential", "rbf-spline", "knn", "ridge")


def make_model(model_id, name=None, **params):
    if model_id.startswith("rbf-"):
        return RbfModel(kernel=model_id[len("rbf-"):], name=name or model_id, **params)
    if model_id == "knn":
        return KnnRegressor(name=name, **params)
    if model_id == "ridge":
        return RidgeRegressor(name=name, **params)
    raise UsageError(f"unknown model id '{model_id}', expected one of {MODEL_IDS}")


def model_from_spec(spec):
    """Inverse of Regressor.spec()."""
    params = dict(spec.get("params", {}))
    if spec["id"].startswith("rbf-"):
        params.pop("kernel", None)
    return make_model(spec["id"], name=spec.get("name"), **params)


def parse_model_list(text):
    ids = [item.strip() for item in text.split(",") if item.strip()]
    if not ids:
        raise UsageError("--models needs at least one model id")
    seen = {}
    models = []
    for model_id in ids:
        seen[model_id] = seen.get(model_id, 0) + 1
        name = model_id if seen[model_id] == 1 else f"{model_id}#{seen[model_id]}"
        models.append(make_model(model_id, name=name))
    return models
