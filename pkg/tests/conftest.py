import numpy as np
import pytest

import qcheat as qc


@pytest.fixture(scope="session")
def small_grid():
    """Cheap one-period grid for module tests: 256 columns, y in [1/64, 2]."""
    return qc.HalfPlaneGrid.build(nx=256, y_min=1 / 64, y_max=2.0, levels_per_octave=8)


@pytest.fixture(scope="session")
def sine_small():
    return qc.sine(0.3, 1, n=256)


def exhaustive_bmo_all_intervals(f: np.ndarray, min_len: int = 4) -> float:
    """Brute force over every periodic subinterval (all starts, all lengths
    up to one period): the oracle for the family-restricted estimator.
    O(n^3) via one dense matrix per start; keep n modest."""
    n = f.size
    ext = np.concatenate([f, f])
    lengths = np.arange(1, n + 1)
    best = 0.0
    for start in range(n):
        W = ext[start:start + n]
        means = np.cumsum(W) / lengths
        dev = np.abs(W[None, :] - means[:, None])
        osc = np.cumsum(dev, axis=1)[np.arange(n), np.arange(n)] / lengths
        best = max(best, float(osc[min_len - 1:].max()))
    return best
