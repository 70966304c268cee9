"""Certified global maximum reach.

The maximum head-to-tail distance of a chain equals the minimum, over one
point per hinge, of the length of the polygonal arc origin -> a_1 -> ...
-> a_n -> end-point.  That function is a sum of norms of affine maps of
the points, hence jointly convex, and each single-hinge block has a closed
form, so cyclic coordinate descent converges to the global minimum.  The
minimizing arc is then straightened into a configuration whose head-to-tail
segment meets every hinge in natural order, which certifies the maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .chain import normalize_theta
from .critical import (
    INCIDENCE_REL_TOL,
    ORDER_TOL,
    incidence_residuals,
    intersection_params,
    max_ordered,
)
from .errors import (
    FoldAmbiguity,
    NoConvergence,
    NotIncident,
    PointOffHinge,
    ZeroValue,
)
from .geom import closest_point, rotate_in_plane

# Default sweep-improvement stopping tolerance, relative to chain scale.
SWEEP_REL_TOL = 1e-12
MAX_SWEEPS = 10000
# Segments shorter than this (relative) are treated as fold coincidences.
FOLD_REL_TOL = 1e-9


@dataclass(frozen=True)
class ArcWitness:
    """Points a_i on the reference hinges realizing a polygonal arc."""

    points: np.ndarray  # (n, d)
    length: float


@dataclass(frozen=True)
class Certification:
    certified: bool
    ordering: np.ndarray | None = None
    reason: str | None = None


@dataclass(frozen=True)
class ReachResult:
    max_distance: float
    witness: ArcWitness
    theta_star: np.ndarray
    ordering_params: np.ndarray | None
    certification: Certification


def _polyline_length(points, endpoint):
    total = float(np.linalg.norm(points[0]))
    for i in range(len(points) - 1):
        total += float(np.linalg.norm(points[i + 1] - points[i]))
    return total + float(np.linalg.norm(endpoint - points[-1]))


def arc_length(chain, points):
    """Length of the arc origin -> a_1 -> ... -> a_n -> end-point.

    Raises PointOffHinge when some a_i is not on its reference hinge.
    Coincident consecutive points are allowed; the length is continuous
    there even though it is not differentiable.
    """
    points = np.asarray(points, dtype=float)
    if points.shape != (chain.n, chain.dimension):
        raise PointOffHinge(f"expected {chain.n} points of dimension {chain.dimension}")
    for i, p in enumerate(points):
        if np.linalg.norm(p - closest_point(chain.hinges[i], p)) > 1e-10 * chain.scale:
            raise PointOffHinge(f"point {i} is off hinge {i}")
    return _polyline_length(points, chain.endpoint)


def single_hinge_min(hinge, p, q):
    """Point a on the hinge minimizing |p - a| + |a - q| (closed form).

    Splitting p and q into hinge-parallel and perpendicular parts reduces
    the problem to the classical reflection construction on a segment in
    the hinge flat: the optimum divides the parallel offset in the ratio of
    the perpendicular heights.  When both points project onto the same
    hinge point the common projection is returned.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    dirs = hinge.directions
    b = hinge.base
    if dirs.shape[0] == 0:
        return b.copy()
    yp = dirs @ (p - b)
    yq = dirs @ (q - b)
    hp = float(np.linalg.norm((p - b) - dirs.T @ yp))
    hq = float(np.linalg.norm((q - b) - dirs.T @ yq))
    span = float(np.linalg.norm(yq - yp))
    if hp + hq <= 1e-300:
        y = 0.5 * (yp + yq)
    elif span <= 1e-300:
        y = yp
    else:
        y = yp + (hp / (hp + hq)) * (yq - yp)
    return b + dirs.T @ y


def _smooth_polish(chain, points):
    """L-BFGS refinement of the arc in hinge-flat coordinates.

    Coordinate descent converges linearly, which can leave residual kinks
    just above the straightening tolerance on ill-conditioned instances;
    away from fold coincidences the arc length is smooth in the flat
    coordinates and a quasi-Newton pass tightens the optimum.  Skipped when
    any segment is near-degenerate (the objective is nonsmooth there).
    """
    n, d = chain.n, chain.dimension
    k = d - 2
    if k == 0:
        return points
    nodes = np.vstack([np.zeros(d), points, chain.endpoint])
    seg = np.diff(nodes, axis=0)
    if np.min(np.linalg.norm(seg, axis=1)) < 1e-6 * chain.scale:
        return points
    bases = np.array([h.base for h in chain.hinges])
    dir_mats = [h.directions for h in chain.hinges]
    y0 = np.concatenate([dir_mats[i] @ (points[i] - bases[i]) for i in range(n)])

    def to_points(y):
        return np.vstack(
            [bases[i] + dir_mats[i].T @ y[i * k : (i + 1) * k] for i in range(n)]
        )

    def fun(y):
        pts = to_points(y)
        fnodes = np.vstack([np.zeros(d), pts, chain.endpoint])
        segs = np.diff(fnodes, axis=0)
        norms = np.linalg.norm(segs, axis=1)
        if np.min(norms) < 1e-12 * chain.scale:
            return float(np.sum(norms)), np.zeros_like(y)
        units = segs / norms[:, None]
        grad = np.concatenate(
            [dir_mats[i] @ (units[i] - units[i + 1]) for i in range(n)]
        )
        return float(np.sum(norms)), grad

    res = minimize(
        fun,
        y0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 500, "ftol": 1e-18, "gtol": 1e-13},
    )
    candidate = to_points(res.x)
    if _polyline_length(candidate, chain.endpoint) <= _polyline_length(
        points, chain.endpoint
    ):
        return candidate
    return points


def min_polygonal_arc(chain, tol=None, max_sweeps=MAX_SWEEPS, polish=True):
    """Global minimum of the polygonal-arc length by coordinate descent.

    Sweeps i = 1..n replacing a_i by the single-hinge optimum for its
    neighbors until the per-sweep improvement drops below ``tol`` (default
    1e-12 of the chain scale); the sweep values never increase.  Raises
    NoConvergence with the last witness after ``max_sweeps``.
    """
    if tol is None:
        tol = SWEEP_REL_TOL * chain.scale
    n = chain.n
    points = chain.feet.copy()
    prev = _polyline_length(points, chain.endpoint)
    converged = False
    for _ in range(max_sweeps):
        for i in range(n):
            left = points[i - 1] if i > 0 else np.zeros(chain.dimension)
            right = points[i + 1] if i < n - 1 else chain.endpoint
            points[i] = single_hinge_min(chain.hinges[i], left, right)
        cur = _polyline_length(points, chain.endpoint)
        if prev - cur <= tol:
            converged = True
            break
        prev = cur
    if not converged:
        raise NoConvergence(
            f"coordinate descent did not converge in {max_sweeps} sweeps",
            witness=ArcWitness(points=points, length=prev),
        )
    if polish:
        points = _smooth_polish(chain, points)
        for i in range(n):
            left = points[i - 1] if i > 0 else np.zeros(chain.dimension)
            right = points[i + 1] if i < n - 1 else chain.endpoint
            points[i] = single_hinge_min(chain.hinges[i], left, right)
    length = _polyline_length(points, chain.endpoint)
    points.flags.writeable = False
    return ArcWitness(points=points, length=length)


def _fold_angle(chain, i, out_vec, target_in, fold_tol, fold_log=None):
    """Rotation angle at hinge i when the incoming segment vanishes.

    The angle must make the rotated outgoing direction compatible with the
    previous hinge's direction space, which gives cos/sin equations with
    two solutions; the smaller rotation is chosen and the other (the fold
    flip producing the mirror maximum) is appended to ``fold_log``.
    """
    if i == 0:
        raise FoldAmbiguity("arc point coincides with the origin")
    if np.linalg.norm(target_in) <= fold_tol:
        raise FoldAmbiguity("consecutive fold points; rotation underdetermined")
    u, w = chain.plane_u[i], chain.plane_w[i]
    out_hat = out_vec / np.linalg.norm(out_vec)
    in_hat = target_in / np.linalg.norm(target_in)
    xi = float(out_hat @ u)
    eta = float(out_hat @ w)
    fixed = out_hat - xi * u - eta * w
    candidates = None
    for drow in chain.hinges[i - 1].directions:
        bcoef = xi * float(u @ drow) + eta * float(w @ drow)
        ccoef = -eta * float(u @ drow) + xi * float(w @ drow)
        amp = float(np.hypot(bcoef, ccoef))
        if amp < 1e-12:
            continue
        rhs = float(in_hat @ drow) - float(fixed @ drow)
        ratio = np.clip(rhs / amp, -1.0, 1.0)
        if abs(rhs) > amp * (1.0 + 1e-8):
            raise FoldAmbiguity("fold alignment equations are inconsistent")
        phase = float(np.arctan2(ccoef, bcoef))
        delta = float(np.arccos(ratio))
        candidates = [phase + delta, phase - delta]
        break
    if candidates is None:
        return 0.0
    wrapped = [((c + np.pi) % (2.0 * np.pi)) - np.pi for c in candidates]
    wrapped.sort(key=abs)
    angle = wrapped[0]
    if fold_log is not None:
        fold_log.append((i, angle, wrapped[1]))
    for drow in chain.hinges[i - 1].directions:
        rotated = rotate_in_plane(u, w, angle, out_hat)
        if abs(float(rotated @ drow) - float(in_hat @ drow)) > 1e-6:
            raise FoldAmbiguity("fold alignment equations are inconsistent")
    return angle


def straighten(chain, witness, fold_log=None):
    """Configuration laying the witness arc along a straight segment.

    Processes hinges tail-to-head; each angle rotates the outgoing segment
    direction onto the prolongation of the incoming one, all expressed in
    reference coordinates (the in-plane angle is invariant under the
    prefix rotations).  At a converged witness the straightened end-point
    lies at distance arc-length from the origin and the segment meets the
    hinges at the witness points in natural order.

    Where consecutive witness points coincide (fold points) the rotation
    has two solutions; the smaller one is used and, when ``fold_log`` is a
    list, tuples (hinge, chosen, alternative) are appended so callers can
    enumerate the mirror maxima.
    """
    points = np.asarray(witness.points, dtype=float)
    n, d = chain.n, chain.dimension
    nodes = np.vstack([np.zeros(d), points, chain.endpoint])
    fold_tol = FOLD_REL_TOL * chain.scale
    theta = np.zeros(n)
    aligned_out = None
    for i in range(n - 1, -1, -1):
        raw_out = nodes[i + 2] - nodes[i + 1]
        if np.linalg.norm(raw_out) > fold_tol:
            out_vec = raw_out
        elif aligned_out is not None and np.linalg.norm(aligned_out) > fold_tol:
            out_vec = aligned_out
        else:
            raise FoldAmbiguity(f"no outgoing direction at hinge {i}")
        in_vec = nodes[i + 1] - nodes[i]
        u, w = chain.plane_u[i], chain.plane_w[i]
        if np.linalg.norm(in_vec) > fold_tol:
            pu, pw = float(out_vec @ u), float(out_vec @ w)
            qu, qw = float(in_vec @ u), float(in_vec @ w)
            p_norm = np.hypot(pu, pw)
            q_norm = np.hypot(qu, qw)
            if p_norm <= fold_tol and q_norm <= fold_tol:
                angle = 0.0
            elif min(p_norm, q_norm) <= fold_tol:
                raise FoldAmbiguity(
                    f"hinge {i}: rotation cannot align the arc (one-sided in-plane component)"
                )
            else:
                angle = float(np.arctan2(qw, qu) - np.arctan2(pw, pu))
        else:
            angle = _fold_angle(
                chain, i, out_vec, nodes[i] - nodes[i - 1], fold_tol, fold_log
            )
        theta[i] = angle
        aligned_out = rotate_in_plane(u, w, angle, out_vec)
    return normalize_theta(chain, theta)


def certify_global_max(chain, theta, tol=ORDER_TOL):
    """Certify a configuration as the global maximum by segment ordering.

    Certified iff the segment from the origin to the end-point meets every
    hinge with parameters 0 <= a_1 <= ... <= a_n <= 1 (ties are fold
    points); by the max-as-min argument this is necessary and sufficient.
    """
    theta = np.asarray(theta, dtype=float)
    try:
        residuals = incidence_residuals(chain, theta)
    except ZeroValue:
        return Certification(certified=False, reason="zero head-to-tail distance")
    if np.max(residuals) > INCIDENCE_REL_TOL * chain.scale:
        return Certification(
            certified=False,
            reason=f"not incident: max hinge residual {np.max(residuals):.3e}",
        )
    try:
        params = intersection_params(chain, theta)
    except NotIncident as exc:
        return Certification(certified=False, reason=str(exc))
    if max_ordered(params, tol):
        return Certification(certified=True, ordering=params)
    return Certification(certified=False, reason="ordering violated")


def max_reach(chain, tol=None, max_sweeps=MAX_SWEEPS):
    """Arc minimization, straightening and certification in one call."""
    witness = min_polygonal_arc(chain, tol=tol, max_sweeps=max_sweeps)
    theta = straighten(chain, witness)
    cert = certify_global_max(chain, theta)
    return ReachResult(
        max_distance=witness.length,
        witness=witness,
        theta_star=theta,
        ordering_params=cert.ordering,
        certification=cert,
    )
