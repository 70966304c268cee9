"""Chain model: forward kinematics, squared head-to-tail distance, analytic
gradient, and the closed-form Hessian at critical configurations.

A chain has n hinges (codimension-2 affine subspaces, reference placement)
and a marked end-point on the last body; the first body is grounded with
its marked point at the origin.  Configuration ``theta`` rotates the tail
sub-chain about hinge i by theta[i], innermost (last hinge) first, so hinge
i's placement depends only on theta[0..i-1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, numdiff
from .errors import ChainValidationError, DegenerateHinge, NotCritical
from .geom import (
    AffineSubspace,
    as_vector,
    closest_point,
    distance_to,
    plane_basis,
    rotate_in_plane,
)

TWO_PI = 2.0 * np.pi

# Gradient-norm gate (relative to scale^2) for the critical-point Hessian
# formula, which is only valid at critical configurations.
CRITICAL_GRAD_REL_TOL = 1e-7
# Relative F below which a configuration counts as lying in the zero fiber.
ZERO_VALUE_REL_TOL = 1e-9


class ChainSpec:
    """Immutable chain description with precomputed rotation-plane frames.

    Validation rejects degenerate input: hinges must have codimension 2,
    no hinge may pass through the origin, consecutive hinges must be
    distinct subspaces.  Hinge base points are canonicalized to the
    perpendicular foot of the origin, which leaves the subspaces unchanged.
    """

    def __init__(self, dimension, hinges, endpoint):
        d = int(dimension)
        if d < 2:
            raise ChainValidationError("dimension must be at least 2")
        hinges = tuple(hinges)
        if not hinges:
            raise ChainValidationError("a chain needs at least one hinge")
        endpoint = as_vector(endpoint, d)
        for idx, h in enumerate(hinges):
            if not isinstance(h, AffineSubspace):
                raise ChainValidationError(f"hinge {idx} is not an AffineSubspace")
            if h.ambient_dim != d:
                raise ChainValidationError(
                    f"hinge {idx} lives in R^{h.ambient_dim}, chain in R^{d}"
                )
            if h.codim != 2:
                raise ChainValidationError(
                    f"hinge {idx} has codimension {h.codim}, expected 2"
                )
        feet = np.array([closest_point(h, np.zeros(d)) for h in hinges])
        scale = max(float(np.linalg.norm(endpoint)), float(np.max(np.linalg.norm(feet, axis=1))))
        if scale <= 0.0:
            raise ChainValidationError("degenerate chain: all geometry at the origin")
        for idx, foot in enumerate(feet):
            if np.linalg.norm(foot) < 1e-10 * scale:
                raise DegenerateHinge(f"hinge {idx} passes through the origin")
        canonical = tuple(
            AffineSubspace(feet[idx], h.directions) for idx, h in enumerate(hinges)
        )
        for idx in range(len(canonical) - 1):
            if self._same_subspace(canonical[idx], canonical[idx + 1], scale):
                raise ChainValidationError(
                    f"hinges {idx} and {idx + 1} are the same subspace"
                )
        planes = [plane_basis(h) for h in canonical]
        self.dimension = d
        self.hinges = canonical
        self.endpoint = endpoint.copy()
        self.endpoint.flags.writeable = False
        self.n = len(canonical)
        self.feet = np.ascontiguousarray(feet)
        self.plane_u = np.ascontiguousarray([p[0] for p in planes])
        self.plane_w = np.ascontiguousarray([p[1] for p in planes])
        self.scale = scale
        for arr in (self.feet, self.plane_u, self.plane_w):
            arr.flags.writeable = False

    @staticmethod
    def _same_subspace(a, b, scale):
        if a.dim != b.dim:
            return False
        if distance_to(a, b.base) > 1e-9 * scale:
            return False
        if a.dim == 0:
            return True
        proj = a.directions @ b.directions.T
        return bool(np.allclose(proj.T @ proj, np.eye(b.dim), atol=1e-9))

    def __repr__(self):
        return f"ChainSpec(d={self.dimension}, n={self.n}, scale={self.scale:.3g})"


def normalize_theta(chain, theta):
    """Validate a configuration and reduce angles to [0, 2*pi)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (chain.n,):
        raise ChainValidationError(
            f"configuration needs {chain.n} angles, got shape {theta.shape}"
        )
    if not np.all(np.isfinite(theta)):
        raise ChainValidationError("configuration has non-finite angles")
    return np.mod(theta, TWO_PI)


def _batch(chain, thetas):
    thetas = np.ascontiguousarray(thetas, dtype=float)
    if thetas.ndim != 2 or thetas.shape[1] != chain.n:
        raise ChainValidationError(f"expected shape (m, {chain.n})")
    return thetas


def end_point_many(chain, thetas):
    """End-point positions for shape (m, n) configurations."""
    return kernels.endpoint_batch(
        chain.feet, chain.plane_u, chain.plane_w, chain.endpoint, _batch(chain, thetas)
    )


def squared_distance_many(chain, thetas):
    return kernels.f_batch(
        chain.feet, chain.plane_u, chain.plane_w, chain.endpoint, _batch(chain, thetas)
    )


def value_and_gradient_many(chain, thetas):
    return kernels.fgrad_batch(
        chain.feet, chain.plane_u, chain.plane_w, chain.endpoint, _batch(chain, thetas)
    )


def end_point(chain, theta):
    """Position of the marked end-point at configuration ``theta``."""
    theta = np.asarray(theta, dtype=float)
    return end_point_many(chain, theta[None, :])[0]


def squared_distance(chain, theta):
    """Squared distance F(theta) between the marked points."""
    theta = np.asarray(theta, dtype=float)
    return float(squared_distance_many(chain, theta[None, :])[0])


def gradient(chain, theta):
    """Analytic gradient of F at ``theta``."""
    theta = np.asarray(theta, dtype=float)
    _, g = value_and_gradient_many(chain, theta[None, :])
    return g[0]


def hinge_placement(chain, theta, i):
    """World pose of hinge ``i`` (0-based) at ``theta``.

    Applies the rotations about hinges 0..i-1 in chain order; independent of
    theta[i..n-1].
    """
    if not 0 <= i < chain.n:
        raise ChainValidationError(f"hinge index {i} out of range")
    theta = np.asarray(theta, dtype=float)
    base = chain.feet[i].copy()
    dirs = chain.hinges[i].directions.copy()
    for j in range(i - 1, -1, -1):
        u, w, bj = chain.plane_u[j], chain.plane_w[j], chain.feet[j]
        base = bj + rotate_in_plane(u, w, theta[j], base - bj)
        dirs = rotate_in_plane(u, w, theta[j], dirs)
    return AffineSubspace(base, dirs)


def rebase(chain, theta):
    """New ChainSpec whose reference placement is the pose at ``theta``."""
    theta = normalize_theta(chain, theta)
    hinges = [hinge_placement(chain, theta, i) for i in range(chain.n)]
    return ChainSpec(chain.dimension, hinges, end_point(chain, theta))


def _prefix_rotate(chain, theta, i, v, inverse=False):
    """Apply the composed linear rotation of hinges 0..i-1 (or its inverse)."""
    v = np.asarray(v, dtype=float)
    if inverse:
        for j in range(i):
            v = rotate_in_plane(chain.plane_u[j], chain.plane_w[j], -theta[j], v)
    else:
        for j in range(i - 1, -1, -1):
            v = rotate_in_plane(chain.plane_u[j], chain.plane_w[j], theta[j], v)
    return v


@dataclass(frozen=True)
class CriticalHessian:
    """Closed-form Hessian data at a critical configuration.

    ``matrix`` holds the full second derivatives d^2F/dtheta_i dtheta_j in
    the chain's own angle chart; ``form`` is the rescaled quadratic form
    h_ij = (1 - alpha_max(i,j)) <nu_i, nu_j> whose signature matches.
    ``alphas`` are the line-intersection coefficients <x, t_i>/<t_i, t_i>.
    """

    matrix: np.ndarray
    form: np.ndarray
    alphas: np.ndarray
    t_norms: np.ndarray
    normals: np.ndarray


def hessian_critical(chain, theta):
    """Analytic Hessian of F at a critical configuration.

    Valid only where the gradient vanishes; raises NotCritical otherwise and
    DegenerateHinge when a current hinge passes through the origin.  The
    normal of each hinge frame is oriented from the chain's own rotation
    generators, so ``matrix`` matches the finite-difference Hessian
    entrywise, not merely in signature.
    """
    theta = np.asarray(theta, dtype=float)
    g = gradient(chain, theta)
    gate = CRITICAL_GRAD_REL_TOL * chain.scale**2
    if np.max(np.abs(g)) > gate:
        raise NotCritical(
            f"gradient norm {np.max(np.abs(g)):.3e} exceeds the critical gate {gate:.3e}"
        )
    n, d = chain.n, chain.dimension
    x = end_point(chain, theta)
    t_norms = np.empty(n)
    normals = np.empty((n, d))
    alphas = np.empty(n)
    for i in range(n):
        placed = hinge_placement(chain, theta, i)
        t = closest_point(placed, np.zeros(d))
        norm_t = float(np.linalg.norm(t))
        if norm_t < 1e-10 * chain.scale:
            raise DegenerateHinge(f"hinge {i} passes through the origin at theta")
        # nu_i = -Omega_i t_i / |t_i| with Omega_i the current rotation
        # generator, conjugated back through the prefix rotations.
        t_local = _prefix_rotate(chain, theta, i, t, inverse=True)
        u, w = chain.plane_u[i], chain.plane_w[i]
        s_t = (t_local @ u) * w - (t_local @ w) * u
        normals[i] = -_prefix_rotate(chain, theta, i, s_t) / norm_t
        t_norms[i] = norm_t
        alphas[i] = float(x @ t) / norm_t**2
    betas = 1.0 - alphas
    gram = normals @ normals.T
    idx = np.arange(n)
    beta_max = betas[np.maximum.outer(idx, idx)]
    half = beta_max * np.multiply.outer(t_norms, t_norms) * gram
    form = beta_max * gram
    return CriticalHessian(
        matrix=2.0 * half,
        form=form,
        alphas=alphas,
        t_norms=t_norms,
        normals=normals,
    )


def hessian_numeric(chain, theta, step=numdiff.HESSIAN_STEP):
    """Finite-difference Hessian of F (central, symmetrized, step 1e-4)."""
    theta = np.asarray(theta, dtype=float)
    return numdiff.hessian(lambda t: squared_distance(chain, t), theta, step)
