"""Brute-force oracles shared by the geometry and acceptance tests."""

from itertools import combinations

import numpy as np


def brute_force_is_face(gens, subset, tol=1e-9):
    """Supporting-hyperplane search: the subset spans a face exactly when
    some hyperplane through the span of d-1 generators containing it keeps
    every other generator strictly on one side."""
    n, d = gens.shape
    subset = set(subset)
    others_all = [i for i in range(n) if i not in subset]
    for extra in combinations(others_all, d - 1 - len(subset)):
        wall = sorted(subset | set(extra))
        rows = gens[wall]
        _, _, vt = np.linalg.svd(rows, full_matrices=True)
        normal = vt[-1]
        rest = [i for i in range(n) if i not in wall]
        vals = gens[rest] @ normal
        scale = max(np.abs(vals).max(initial=0.0), 1.0)
        if np.all(vals > tol * scale) or np.all(vals < -tol * scale):
            return True
    return False


def random_cone_generators(rng, n, d, bridge=False):
    steps = rng.standard_normal((n, d))
    if bridge:
        steps = steps - steps.mean(axis=0)
        return np.cumsum(steps, axis=0)[:-1]
    return np.cumsum(steps, axis=0)
