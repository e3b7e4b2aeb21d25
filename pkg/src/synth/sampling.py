#src/synth/sampling.py
import numpy as np

from src.errors import UsageError
from src.synth.landscape import resolve_bounds


def latin_hypercube(n, dim, seed=0, bounds=None):
    """n x dim Latin Hypercube design mapped onto the domain.

    Each dimension gets an independent permutation of the strata 0..n-1 and a
    uniform draw inside each stratum, so every axis has exactly one point per
    interval [i/n, (i+1)/n) of the unit range."""
    if n < 1 or dim < 1:
        raise UsageError(f"need n >= 1 and dim >= 1, got {n}, {dim}")
    bounds = resolve_bounds(dim, bounds)
    rng = np.random.default_rng(seed)
    unit = np.empty((n, dim))
    for j in range(dim):
        strata = rng.permutation(n)
        unit[:, j] = (strata + rng.random(n)) / n
    return bounds[:, 0] + unit * (bounds[:, 1] - bounds[:, 0])
