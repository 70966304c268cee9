"""Pure-NumPy evaluation kernels (fallback backend).

Same contract as the compiled ``_speedups`` extension: batched forward
kinematics and gradients for a packed chain, vectorized over the batch.

Packed chain arrays (all C-contiguous float64):
  base[n, d]   point on each reference hinge (the perpendicular foot);
  u[n, d], w[n, d]  orthonormal basis of each hinge's rotation 2-plane;
  x[d]         reference end-point.

Rotation i sends p to  p + ((c-1)*xi - s*eta)*u_i + (s*xi + (c-1)*eta)*w_i
with xi = <p - b_i, u_i>, eta = <p - b_i, w_i>; the end-point map applies
rotation n-1 first and rotation 0 last.
"""

import numpy as np


def endpoint_batch(base, u, w, x, thetas):
    """End-point positions for a batch of configurations, shape (m, d)."""
    thetas = np.ascontiguousarray(thetas, dtype=float)
    m = thetas.shape[0]
    n = base.shape[0]
    p = np.broadcast_to(x, (m, x.shape[0])).copy()
    for i in range(n - 1, -1, -1):
        c = np.cos(thetas[:, i])
        s = np.sin(thetas[:, i])
        q = p - base[i]
        xi = q @ u[i]
        eta = q @ w[i]
        dxi = (c - 1.0) * xi - s * eta
        deta = s * xi + (c - 1.0) * eta
        p += np.multiply.outer(dxi, u[i])
        p += np.multiply.outer(deta, w[i])
    return p


def f_batch(base, u, w, x, thetas):
    """Squared end-point distances, shape (m,)."""
    p = endpoint_batch(base, u, w, x, thetas)
    return np.einsum("md,md->m", p, p)


def fgrad_batch(base, u, w, x, thetas):
    """Squared distances and their gradients, shapes (m,) and (m, n).

    Forward pass records the post-rotation in-plane components at each
    hinge; the backward pass transports the end-point by inverse rotations,
    giving dF/dtheta_i = 2 <transported e, S_i (p_i - b_i)>.
    """
    thetas = np.ascontiguousarray(thetas, dtype=float)
    m, n = thetas.shape
    d = x.shape[0]
    p = np.broadcast_to(x, (m, d)).copy()
    cs = np.cos(thetas)
    sn = np.sin(thetas)
    post_xi = np.empty((m, n))
    post_eta = np.empty((m, n))
    for i in range(n - 1, -1, -1):
        c = cs[:, i]
        s = sn[:, i]
        q = p - base[i]
        xi = q @ u[i]
        eta = q @ w[i]
        nxi = c * xi - s * eta
        neta = s * xi + c * eta
        post_xi[:, i] = nxi
        post_eta[:, i] = neta
        p += np.multiply.outer(nxi - xi, u[i])
        p += np.multiply.outer(neta - eta, w[i])
    f = np.einsum("md,md->m", p, p)
    grad = np.empty((m, n))
    g = p.copy()
    for i in range(n):
        gu = g @ u[i]
        gw = g @ w[i]
        grad[:, i] = 2.0 * (post_xi[:, i] * gw - post_eta[:, i] * gu)
        c = cs[:, i]
        s = sn[:, i]
        ngu = c * gu + s * gw
        ngw = -s * gu + c * gw
        g += np.multiply.outer(ngu - gu, u[i])
        g += np.multiply.outer(ngw - gw, w[i])
    return f, grad
