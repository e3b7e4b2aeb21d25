#src/io/tables.py
"""CSV readers and writers (UTF-8, header row, comma delimiter, '.' decimals).

Floats are written with their shortest round-trip repr, so every file the
tool writes reads back to bit-identical values."""

import numpy as np
import pandas as pd

from src.core import Dataset, PointWeights, PredictionMatrix
from src.errors import DataError


def _read(path):
    try:
        return pd.read_csv(path, encoding="utf-8", float_precision="round_trip")
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot parse CSV {path}: {exc}") from None


def _numeric(frame, columns, path):
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise DataError(f"{path}: missing columns {missing}")
    block = frame[list(columns)]
    try:
        values = block.to_numpy(dtype=float)
    except (TypeError, ValueError):
        raise DataError(f"{path}: non-numeric values in columns {list(columns)}") from None
    if not np.isfinite(values).all():
        raise DataError(f"{path}: missing or non-finite values in columns {list(columns)}")
    return values


def read_dataset(path, target, features=None):
    """Dataset from a CSV; features default to every column except the target."""
    frame = _read(path)
    if target not in frame.columns:
        raise DataError(f"{path}: target column '{target}' not found")
    features = list(features) if features else [c for c in frame.columns if c != target]
    if not features:
        raise DataError(f"{path}: no feature columns besides '{target}'")
    points = _numeric(frame, features, path)
    targets = _numeric(frame, [target], path)[:, 0]
    return Dataset(points, targets, tuple(features))


def read_points(path, exclude=()):
    """Coordinate matrix from every column not listed in `exclude`."""
    frame = _read(path)
    columns = [c for c in frame.columns if c not in set(exclude)]
    if not columns:
        raise DataError(f"{path}: no coordinate columns")
    return _numeric(frame, columns, path)


def read_predictions(path, target=None, model_names=None):
    """(PredictionMatrix, targets or None) from a CSV of model columns.

    Model columns default to every column except the target."""
    frame = _read(path)
    targets = None
    if target is not None and target in frame.columns:
        targets = _numeric(frame, [target], path)[:, 0]
    names = list(model_names) if model_names else [c for c in frame.columns if c != target]
    if not names:
        raise DataError(f"{path}: no model prediction columns")
    return PredictionMatrix(_numeric(frame, names, path), tuple(names)), targets


def read_point_weights(path, column="beta"):
    frame = _read(path)
    return PointWeights(_numeric(frame, [column], path)[:, 0])


def write_table(path, columns):
    """Writes an ordered mapping of column name -> sequence as CSV."""
    frame = pd.DataFrame(dict(columns))
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


def write_dataset(path, points, targets, feature_names=None):
    names = feature_names or [f"x_{j + 1}" for j in range(points.shape[1])]
    columns = {name: points[:, j] for j, name in enumerate(names)}
    columns["y"] = targets
    write_table(path, columns)
