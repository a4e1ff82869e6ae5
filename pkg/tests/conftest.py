import numpy as np
import pytest

from zerodyn.presets import figure_presets
from zerodyn.rootfind import RootFindOptions
from zerodyn.tracker import track

_CACHE = {}


@pytest.fixture(scope="session")
def tracked():
    """Memoized tracked trajectories for the shipped figure presets."""

    def run(name, n_scan=1024):
        key = (name, n_scan)
        if key not in _CACHE:
            pre = figure_presets()[name]
            _CACHE[key] = (
                pre,
                track(
                    pre.model,
                    pre.point,
                    pre.dispersion,
                    pre.t_grid,
                    RootFindOptions(n_scan=n_scan),
                    pre.frame,
                ),
            )
        return _CACHE[key]

    return run


def brute_det(a: np.ndarray) -> complex:
    """Permutation-expansion determinant, independent of LAPACK."""
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    total = 0.0 + 0.0j
    import itertools

    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            j = i
            length = 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        term = sign
        for i in range(n):
            term = term * a[i, perm[i]]
        total += term
    return total
