"""Dimension-generic affine geometry for hinge chains.

Hinges are codimension-2 affine subspaces of R^d stored as a base point
plus an orthonormal basis of the direction space; lines use the same type
with a single direction.  Rotations about a hinge act in the 2-plane
orthogonal to the direction space.  All operations are pure functions of
immutable inputs and are safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHinge, GeometryError

# Orthonormality required of stored direction bases.
ORTHONORMAL_TOL = 1e-12
# Relative tolerance below which a hinge counts as passing through a point.
DEGENERATE_REL_TOL = 1e-10
# Relative tolerance for classifying a line as meeting a subspace.
MEET_REL_TOL = 1e-8
# Absolute tolerance for "direction lies in the span" tests on unit vectors.
PARALLEL_TOL = 1e-8


def as_vector(x, dim=None):
    """Validate and return a finite float vector of dimension >= 2."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise GeometryError(f"expected a vector, got array of shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise GeometryError(f"expected dimension {dim}, got {v.shape[0]}")
    if v.shape[0] < 2:
        raise GeometryError("ambient dimension must be at least 2")
    if not np.all(np.isfinite(v)):
        raise GeometryError("vector has non-finite coordinates")
    return v


@dataclass(frozen=True)
class AffineSubspace:
    """Affine subspace of R^d: a base point plus orthonormal directions.

    ``directions`` has shape (k, d) with orthonormal rows.  A hinge has
    k = d - 2 (a point in the plane, a line in 3-space, ...); a line has
    k = 1.  Rows must be orthonormal to 1e-12 and k < d.
    """

    base: np.ndarray
    directions: np.ndarray

    def __post_init__(self):
        base = as_vector(self.base)
        d = base.shape[0]
        dirs = np.asarray(self.directions, dtype=float)
        if dirs.size == 0:
            dirs = np.zeros((0, d))
        if dirs.ndim == 1:
            dirs = dirs[None, :]
        if dirs.ndim != 2 or dirs.shape[1] != d:
            raise GeometryError(
                f"directions of shape {dirs.shape} do not match dimension {d}"
            )
        k = dirs.shape[0]
        if k >= d:
            raise GeometryError(f"subspace dimension {k} must be below ambient {d}")
        if not np.all(np.isfinite(dirs)):
            raise GeometryError("directions have non-finite coordinates")
        gram = dirs @ dirs.T
        if k and np.max(np.abs(gram - np.eye(k))) > ORTHONORMAL_TOL:
            raise GeometryError("directions are not orthonormal to 1e-12")
        base = base.copy()
        dirs = dirs.copy()
        base.flags.writeable = False
        dirs.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "directions", dirs)

    @property
    def ambient_dim(self):
        return self.base.shape[0]

    @property
    def dim(self):
        return self.directions.shape[0]

    @property
    def codim(self):
        return self.ambient_dim - self.dim


def line(base, direction):
    """Line through ``base`` with the given (normalized here) direction."""
    direction = as_vector(direction)
    nrm = np.linalg.norm(direction)
    if nrm == 0.0:
        raise GeometryError("line direction must be nonzero")
    return AffineSubspace(base, direction[None, :] / nrm)


def closest_point(subspace, p):
    """Perpendicular foot of ``p`` on the subspace."""
    p = as_vector(p, subspace.ambient_dim)
    rel = p - subspace.base
    dirs = subspace.directions
    return subspace.base + dirs.T @ (dirs @ rel)


def distance_to(subspace, p):
    """Euclidean distance from ``p`` to the subspace."""
    return float(np.linalg.norm(np.asarray(p, dtype=float) - closest_point(subspace, p)))


def _complement_unit(rows, d):
    """Deterministic unit vector orthogonal to all ``rows``.

    Completes the orthonormal set by Gram-Schmidt over the canonical basis,
    always picking the canonical vector with the largest residual; the sign
    is fixed by a positive component along that seed vector.
    """
    eye = np.eye(d)
    resid = eye - (rows.T @ (rows @ eye) if len(rows) else 0.0)
    norms = np.linalg.norm(resid, axis=0)
    j = int(np.argmax(norms))
    if norms[j] < 1e-9:
        raise GeometryError("no orthogonal complement direction found")
    return resid[:, j] / norms[j]


def plane_basis(subspace):
    """Orthonormal basis (u, w) of the rotation 2-plane of a hinge.

    The 2-plane is the orthogonal complement of the direction space.  The
    basis, and hence the sense of positive rotation angles, is a fixed
    deterministic function of the directions.
    """
    if subspace.codim != 2:
        raise GeometryError("rotation plane requires a codimension-2 subspace")
    d = subspace.ambient_dim
    u = _complement_unit(subspace.directions, d)
    w = _complement_unit(np.vstack([subspace.directions, u[None, :]]), d)
    return u, w


def rotate_in_plane(u, w, angle, vectors):
    """Apply the linear rotation by ``angle`` in span{u, w} to row vectors."""
    vectors = np.asarray(vectors, dtype=float)
    c = np.cos(angle)
    s = np.sin(angle)
    xi = vectors @ u
    eta = vectors @ w
    dxi = (c - 1.0) * xi - s * eta
    deta = s * xi + (c - 1.0) * eta
    return vectors + np.multiply.outer(dxi, u) + np.multiply.outer(deta, w)


def rotate_about(subspace, angle, p):
    """Rotate ``p`` by ``angle`` about a codimension-2 affine subspace.

    Fixes the subspace pointwise and rotates the orthogonal 2-plane with the
    deterministic orientation of :func:`plane_basis`.
    """
    u, w = plane_basis(subspace)
    p = as_vector(p, subspace.ambient_dim)
    return subspace.base + rotate_in_plane(u, w, angle, p - subspace.base)


@dataclass(frozen=True)
class HingeFrame:
    """Perpendicular foot ``t`` of the origin on a hinge plus the unit
    normal ``nu`` of the hyperplane spanned by the hinge and the origin."""

    t: np.ndarray
    nu: np.ndarray
    norm_t: float


def hinge_frame(subspace, scale=None):
    """Frame (t, nu) encoding a hinge relative to the origin.

    ``t`` is the foot of the perpendicular from the origin, ``nu`` the unit
    normal of the hyperplane through the hinge and the origin.  The sign of
    ``nu`` is a deterministic local choice (canonical-basis completion); only
    orientation conventions, never reported values, depend on it.

    Raises DegenerateHinge when the hinge passes through the origin within
    1e-10 of the scene scale.
    """
    if subspace.codim != 2:
        raise GeometryError("hinge frame requires a codimension-2 subspace")
    d = subspace.ambient_dim
    t = closest_point(subspace, np.zeros(d))
    norm_t = float(np.linalg.norm(t))
    if scale is None:
        scale = max(1.0, float(np.linalg.norm(subspace.base)))
    if norm_t < DEGENERATE_REL_TOL * scale:
        raise DegenerateHinge("hinge passes through the origin; frame undefined")
    nu = _complement_unit(np.vstack([subspace.directions, t[None, :] / norm_t]), d)
    return HingeFrame(t=t, nu=nu, norm_t=norm_t)


@dataclass(frozen=True)
class Incidence:
    """Outcome of a line/subspace incidence test.

    ``kind`` is one of "meets", "parallel", "skew".  ``param`` is the line
    parameter of the meeting point for "meets" and of the closest approach
    for "skew" (None for "parallel").  ``residual`` is the minimal Euclidean
    distance between line and subspace.
    """

    kind: str
    param: float | None
    residual: float


def line_meet(ln, hinge, scale=None):
    """Classify the incidence of a line with an affine subspace.

    Meets iff the direction spaces are transverse and the minimal distance
    is at most 1e-8 of ``scale``; a line direction inside the subspace's
    direction span gives "parallel" (projective incidence at infinity).
    """
    if ln.dim != 1:
        raise GeometryError("first argument must be a line (one direction)")
    if ln.ambient_dim != hinge.ambient_dim:
        raise GeometryError("mixed ambient dimensions")
    if scale is None:
        scale = max(
            1.0,
            float(np.linalg.norm(ln.base)),
            float(np.linalg.norm(hinge.base)),
        )
    v = ln.directions[0]
    dirs = hinge.directions
    v_transverse = v - dirs.T @ (dirs @ v) if hinge.dim else v
    cols = np.hstack([v[:, None], -dirs.T]) if hinge.dim else v[:, None]
    rhs = hinge.base - ln.base
    sol, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
    residual = float(np.linalg.norm(cols @ sol - rhs))
    if np.linalg.norm(v_transverse) <= PARALLEL_TOL:
        return Incidence(kind="parallel", param=None, residual=residual)
    if residual <= MEET_REL_TOL * scale:
        return Incidence(kind="meets", param=float(sol[0]), residual=residual)
    return Incidence(kind="skew", param=float(sol[0]), residual=residual)
