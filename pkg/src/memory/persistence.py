#src/memory/persistence.py
"""SQLite cache of out-of-fold prediction matrices.

Cross-validation is the expensive stage of a fit (n x s model fits for LOO),
while the QP on top of it is almost free. Re-running a fit with a different
solver or weighting on the same data should not redo the CV, so the matrix is
stored under a fingerprint of everything it depends on: the points, the
targets, the model specs and the CV scheme."""

import hashlib
import json
import os
import sqlite3

import numpy as np

from src.core import PredictionMatrix
from src.utils.logger import get_logger

logger = get_logger(__name__)


class PredictionCache:
    def __init__(self, db_path="data/prediction_cache.db"):
        self.db_path = db_path
        directory = os.path.dirname(db_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self._init_db()

    def _init_db(self):
        with sqlite3.connect(self.db_path) as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS prediction_cache (
                    fingerprint TEXT PRIMARY KEY,
                    model_names TEXT,
                    entries TEXT,
                    n INTEGER,
                    s INTEGER,
                    last_seen TIMESTAMP DEFAULT CURRENT_TIMESTAMP
                )
            """)
            conn.commit()

    @staticmethod
    def fingerprint(data, models, scheme):
        """MD5 over the raw data bytes, model specs and CV scheme."""
        digest = hashlib.md5()
        digest.update(np.ascontiguousarray(data.points).tobytes())
        digest.update(np.ascontiguousarray(data.targets).tobytes())
        digest.update(str(data.points.shape).encode())
        specs = [model.spec() for model in models]
        digest.update(json.dumps(specs, sort_keys=True).encode())
        digest.update(scheme.describe().encode())
        return digest.hexdigest()

    def store(self, fingerprint, matrix):
        with sqlite3.connect(self.db_path) as conn:
            conn.execute(
                """
                INSERT OR REPLACE INTO prediction_cache (fingerprint, model_names, entries, n, s)
                VALUES (?, ?, ?, ?, ?)
                """,
                (
                    fingerprint,
                    json.dumps(list(matrix.model_names)),
                    json.dumps(matrix.entries.tolist()),
                    matrix.n,
                    matrix.s,
                ),
            )
            conn.commit()
        logger.info("[Cache] stored %dx%d matrix under %s", matrix.n, matrix.s, fingerprint[:12])

    def recall(self, fingerprint):
        """The cached PredictionMatrix, or None on a miss."""
        with sqlite3.connect(self.db_path) as conn:
            row = conn.execute(
                "SELECT model_names, entries FROM prediction_cache WHERE fingerprint = ?",
                (fingerprint,),
            ).fetchone()
        if row is None:
            logger.info("[Cache] miss for %s", fingerprint[:12])
            return None
        logger.info("[Cache] hit for %s", fingerprint[:12])
        return PredictionMatrix(np.array(json.loads(row[1]), dtype=float), tuple(json.loads(row[0])))

    def forget(self, fingerprint):
        with sqlite3.connect(self.db_path) as conn:
            conn.execute("DELETE FROM prediction_cache WHERE fingerprint = ?", (fingerprint,))
            conn.commit()
