"""Dense torus-grid evaluation, used as a brute-force verification oracle."""

import numpy as np

from .chain import squared_distance_many

TWO_PI = 2.0 * np.pi

_CHUNK = 1 << 16


def grid_axis(resolution):
    """Uniform grid on [0, 2*pi) with ``resolution`` samples."""
    return np.arange(resolution) * (TWO_PI / resolution)


def iter_grid(n, resolution, chunk=_CHUNK):
    """Yield (m, n) blocks covering the full resolution^n torus grid."""
    axis = grid_axis(resolution)
    total = resolution**n
    shape = (resolution,) * n
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        multi = np.unravel_index(idx, shape)
        yield axis[np.stack(multi, axis=1)]


def grid_max(chain, resolution):
    """Maximum of F over the dense torus grid; returns (f_max, theta)."""
    best_f = -np.inf
    best_theta = None
    for block in iter_grid(chain.n, resolution):
        f = squared_distance_many(chain, block)
        j = int(np.argmax(f))
        if f[j] > best_f:
            best_f = float(f[j])
            best_theta = block[j].copy()
    return best_f, best_theta


def grid_seeds(n, resolution, limit=1 << 22):
    """All grid points as search seeds, shape (resolution^n, n)."""
    total = resolution**n
    if total > limit:
        raise ValueError(f"grid of {total} seeds exceeds the {limit} guard")
    return np.concatenate(list(iter_grid(n, resolution)), axis=0)
