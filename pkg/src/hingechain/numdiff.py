"""Finite-difference oracles used for cross-checking analytic derivatives."""

import numpy as np

GRADIENT_STEP = 1e-5
HESSIAN_STEP = 1e-4


def gradient(fn, x, step=GRADIENT_STEP):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        g[i] = (fn(xp) - fn(xm)) / (2.0 * step)
    return g


def hessian(fn, x, step=HESSIAN_STEP):
    """Central-difference Hessian of a scalar function, symmetrized.

    Exact on quadratics up to round-off; uses only function values so it
    stays independent of any analytic gradient it is checked against.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    h = np.empty((n, n))
    f0 = fn(x)
    for i in range(n):
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        h[i, i] = (fn(xp) - 2.0 * f0 + fn(xm)) / step**2
    for i in range(n):
        for j in range(i):
            xpp = x.copy()
            xpm = x.copy()
            xmp = x.copy()
            xmm = x.copy()
            xpp[[i, j]] += step
            xmm[[i, j]] -= step
            xpm[i] += step
            xpm[j] -= step
            xmp[i] -= step
            xmp[j] += step
            val = (fn(xpp) - fn(xpm) - fn(xmp) + fn(xmm)) / (4.0 * step**2)
            h[i, j] = val
            h[j, i] = val
    return 0.5 * (h + h.T)
