"""Panel-and-hinge specialization: reflection involutions of configuration
space, flat configurations, fold points, and extremal orbit structure.

A panel chain carries one hyperplane normal per body; both hinges of a
body (and the marked point of an end body) must lie in the body's
hyperplane.  Reflecting the sub-chain between a marked point and hinge k
in the hyperplane they span preserves the squared head-to-tail distance
and is an involution of the torus; flat configurations are fixed by all of
them, while a non-flat critical configuration has an orbit of size 2^c
with c its fold count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import (
    CRITICAL_GRAD_REL_TOL,
    ZERO_VALUE_REL_TOL,
    ChainSpec,
    gradient,
    normalize_theta,
    rebase,
    squared_distance,
)
from .critical import (
    DEDUP_TOL,
    intersection_params,
    min_ordered,
    torus_distance,
)
from .errors import (
    ChainValidationError,
    DegenerateHyperplane,
    GeometryError,
    Inconsistent,
    NotCritical,
    NotFlattenable,
    NotPanelChain,
    ZeroValue,
)
from .geom import _complement_unit, distance_to

TWO_PI = 2.0 * np.pi

# Coincidence threshold on intersection parameters for fold detection.
FOLD_PARAM_TOL = 1e-8
# Normals closer than this (in |cos|) count as the same hyperplane direction.
NORMAL_ALIGN_TOL = 1e-8


class PanelChainSpec:
    """Chain whose bodies are panels: hyperplanes containing their hinges.

    ``panel_normals`` holds one unit normal per body, bodies 0..n in chain
    order; body 0 carries the origin marked point, body n the end-point.
    Panel validity is checked, not inferred.
    """

    def __init__(self, chain, panel_normals):
        if not isinstance(chain, ChainSpec):
            raise ChainValidationError("PanelChainSpec wraps a ChainSpec")
        normals = np.asarray(panel_normals, dtype=float)
        if normals.shape != (chain.n + 1, chain.dimension):
            raise ChainValidationError(
                f"need {chain.n + 1} panel normals of dimension {chain.dimension}"
            )
        norms = np.linalg.norm(normals, axis=1)
        if np.any(norms < 1e-12):
            raise ChainValidationError("panel normals must be nonzero")
        normals = normals / norms[:, None]
        tol = 1e-10 * max(1.0, chain.scale)
        for body in range(chain.n + 1):
            m = normals[body]
            for h in self._body_hinges(chain, body):
                if np.max(np.abs(chain.hinges[h].directions @ m), initial=0.0) > tol:
                    raise ChainValidationError(
                        f"hinge {h} does not lie in the hyperplane of body {body}"
                    )
            anchor = chain.feet[self._body_hinges(chain, body)[0]]
            for h in self._body_hinges(chain, body)[1:]:
                if abs(float((chain.feet[h] - anchor) @ m)) > tol:
                    raise ChainValidationError(
                        f"hinges of body {body} are not coplanar with its normal"
                    )
            if body == 0 and abs(float(anchor @ m)) > tol:
                raise ChainValidationError("origin marked point is off panel 0")
            if body == chain.n and abs(float((chain.endpoint - anchor) @ m)) > tol:
                raise ChainValidationError("end-point is off the last panel")
        self.chain = chain
        self.panel_normals = normals
        self.panel_normals.flags.writeable = False

    @staticmethod
    def _body_hinges(chain, body):
        if body == 0:
            return [0]
        if body == chain.n:
            return [chain.n - 1]
        return [body - 1, body]

    def __repr__(self):
        return f"PanelChainSpec({self.chain!r})"


def _as_panel(pchain):
    if not isinstance(pchain, PanelChainSpec):
        raise NotPanelChain("this operation requires a PanelChainSpec")
    return pchain


def _rotation_matrix(u, w, angle):
    c, s = np.cos(angle), np.sin(angle)
    outer_uu = np.outer(u, u)
    outer_ww = np.outer(w, w)
    outer_wu = np.outer(w, u)
    outer_uw = np.outer(u, w)
    return np.eye(u.size) + (c - 1.0) * (outer_uu + outer_ww) + s * (outer_wu - outer_uw)


@dataclass(frozen=True)
class _Pose:
    rot: np.ndarray
    off: np.ndarray

    def apply(self, p):
        return self.rot @ p + self.off

    def apply_vec(self, v):
        return self.rot @ v

    def compose(self, other):
        return _Pose(self.rot @ other.rot, self.rot @ other.off + self.off)

    def inverse(self):
        rt = self.rot.T
        return _Pose(rt, -(rt @ self.off))


def _joint_pose(chain, j, angle):
    rot = _rotation_matrix(chain.plane_u[j], chain.plane_w[j], angle)
    b = chain.feet[j]
    return _Pose(rot, b - rot @ b)


def _body_poses(chain, theta):
    poses = [_Pose(np.eye(chain.dimension), np.zeros(chain.dimension))]
    for j in range(chain.n):
        poses.append(poses[j].compose(_joint_pose(chain, j, theta[j])))
    return poses


def _extract_angle(chain, j, ref_point, target_point, tol):
    b = chain.feet[j]
    u, w = chain.plane_u[j], chain.plane_w[j]
    pv = ref_point - b
    tv = target_point - b
    p = np.array([pv @ u, pv @ w])
    q = np.array([tv @ u, tv @ w])
    radius = np.linalg.norm(p)
    if radius < tol:
        raise GeometryError("tracked point lies on the rotation axis")
    if abs(np.linalg.norm(q) - radius) > 1e-6 * max(1.0, radius):
        raise GeometryError("tracked point target is off the rotation circle")
    return float(np.arctan2(q[1], q[0]) - np.arctan2(p[1], p[0]))


def involution(pchain, theta, anchor, k):
    """Reflect the tail sub-chain in the hyperplane through a marked point
    and hinge k (current placement), re-expressed in the torus chart.

    ``anchor`` selects the marked point: "head" (origin) or "tail"
    (end-point).  The map preserves F, is its own inverse up to angle
    reduction, and fixes flat configurations.  Raises DegenerateHyperplane
    when the marked point lies on the hinge's affine hull.
    """
    pchain = _as_panel(pchain)
    chain = pchain.chain
    if anchor not in ("head", "tail"):
        raise ValueError("anchor must be 'head' or 'tail'")
    if not 0 <= k < chain.n:
        raise ValueError(f"hinge index {k} out of range")
    theta = normalize_theta(chain, theta)
    n, d = chain.n, chain.dimension
    poses = _body_poses(chain, theta)
    endpoint_w = poses[n].apply(chain.endpoint)
    point = np.zeros(d) if anchor == "head" else endpoint_w
    base_w = poses[k].apply(chain.feet[k])
    dirs_w = chain.hinges[k].directions @ poses[k].rot.T
    rel = base_w - point
    rel_perp = rel - dirs_w.T @ (dirs_w @ rel) if dirs_w.size else rel
    nrm = np.linalg.norm(rel_perp)
    if nrm < 1e-9 * chain.scale:
        raise DegenerateHyperplane(
            "marked point lies on the hinge's affine hull; reflection undefined"
        )
    span_rows = np.vstack([dirs_w, rel_perp[None, :] / nrm])
    mirror = _complement_unit(span_rows, d)

    def reflect(p):
        return p - 2.0 * float((p - point) @ mirror) * mirror

    new_theta = theta.copy()
    chart = poses[k]
    tol = 1e-9 * chain.scale
    for j in range(k, n):
        if j + 1 <= n - 1:
            hinge_next = chain.hinges[j + 1]
            candidates = [chain.feet[j + 1]]
            candidates += [chain.feet[j + 1] + row for row in hinge_next.directions]
            candidates += [chain.feet[j + 1] - row for row in hinge_next.directions]
        else:
            candidates = [chain.endpoint]
        dists = [distance_to(chain.hinges[j], c) for c in candidates]
        pick = int(np.argmax(dists))
        tracked = candidates[pick]
        target_world = reflect(poses[j + 1].apply(tracked))
        tau = chart.inverse().apply(target_world)
        angle = _extract_angle(chain, j, tracked, tau, tol)
        new_theta[j] = angle % TWO_PI
        chart = chart.compose(_joint_pose(chain, j, angle))
    f_before = squared_distance(chain, theta)
    f_after = squared_distance(chain, new_theta)
    if abs(f_after - f_before) > 1e-6 * chain.scale**2:
        raise GeometryError("involution failed to preserve the squared distance")
    return new_theta


def flat_configurations(pchain):
    """The 2^n configurations with every panel in the reference hyperplane.

    Requires a flat reference placement (all panel normals parallel and all
    geometry in the plane through the origin); raises NotFlattenable
    otherwise, in which case :func:`flatten_reference` produces a flat
    rebase first.  Configuration index bit j selects theta_j in {0, pi}.
    """
    pchain = _as_panel(pchain)
    chain = pchain.chain
    if chain.n > 20:
        raise ValueError("flat enumeration guarded to n <= 20")
    m0 = pchain.panel_normals[0]
    tol = 1e-9 * max(1.0, chain.scale)
    if np.max(1.0 - np.abs(pchain.panel_normals @ m0)) > 1e-9:
        raise NotFlattenable("panel normals are not parallel in the reference")
    offsets = [abs(float(chain.feet[i] @ m0)) for i in range(chain.n)]
    offsets.append(abs(float(chain.endpoint @ m0)))
    if max(offsets) > tol:
        raise NotFlattenable("reference geometry is not contained in one hyperplane")
    configs = []
    for bits in range(2**chain.n):
        theta = np.array(
            [np.pi if (bits >> j) & 1 else 0.0 for j in range(chain.n)]
        )
        configs.append(theta)
    return configs


def flatten_reference(pchain):
    """Rebased panel chain whose reference placement is flat.

    Works hinge by hinge: each angle rotates the next panel's normal onto
    the first panel's normal direction (two in-plane solutions; the smaller
    rotation is used).
    """
    pchain = _as_panel(pchain)
    chain = pchain.chain
    normals = pchain.panel_normals
    theta = np.zeros(chain.n)
    chart = _Pose(np.eye(chain.dimension), np.zeros(chain.dimension))
    m0 = normals[0]
    for j in range(chain.n):
        target = chart.inverse().apply_vec(m0)
        m = normals[j + 1]
        u, w = chain.plane_u[j], chain.plane_w[j]
        p = np.array([m @ u, m @ w])
        best = None
        for sign in (1.0, -1.0):
            q = np.array([sign * (target @ u), sign * (target @ w)])
            if np.linalg.norm(q) < 1e-12 or np.linalg.norm(p) < 1e-12:
                continue
            ang = float(np.arctan2(q[1], q[0]) - np.arctan2(p[1], p[0]))
            ang = (ang + np.pi) % TWO_PI - np.pi
            if best is None or abs(ang) < abs(best):
                best = ang
        theta[j] = 0.0 if best is None else best
        chart = chart.compose(_joint_pose(chain, j, theta[j]))
    poses = _body_poses(chain, theta)
    new_chain = rebase(chain, theta)
    new_normals = np.array(
        [poses[b].apply_vec(normals[b]) for b in range(chain.n + 1)]
    )
    return PanelChainSpec(new_chain, new_normals)


@dataclass(frozen=True)
class FoldReport:
    """Fold points of a critical configuration.

    ``folds`` lists (k, a) for consecutive hinge pairs (k, k+1) meeting the
    head-to-tail line at the same parameter a with a genuine hyperplane
    change; ``hyperplane_count`` counts the distinct hyperplanes through
    the origin and the hinges (generically folds + 1); parameter ties
    without a normal change are non-generic and reported separately.
    """

    folds: tuple
    count: int
    hyperplane_count: int
    non_generic: tuple


def fold_points(chain_or_panel, theta):
    """Detect fold points of a critical configuration with F > 0."""
    chain = (
        chain_or_panel.chain
        if isinstance(chain_or_panel, PanelChainSpec)
        else chain_or_panel
    )
    theta = normalize_theta(chain, theta)
    f = squared_distance(chain, theta)
    if f <= ZERO_VALUE_REL_TOL * chain.scale**2:
        raise ZeroValue("fold points are defined for nonzero critical values")
    g = gradient(chain, theta)
    if np.max(np.abs(g)) > CRITICAL_GRAD_REL_TOL * chain.scale**2:
        raise NotCritical("fold detection requires a critical configuration")
    params = intersection_params(chain, theta)
    normals = _origin_hinge_normals(chain, theta)
    folds = []
    non_generic = []
    for k in range(chain.n - 1):
        a0, a1 = params[k], params[k + 1]
        coincide = (
            bool(np.isinf(a0) and np.isinf(a1)) or abs(a0 - a1) <= FOLD_PARAM_TOL
        )
        if not coincide:
            continue
        distinct = abs(float(normals[k] @ normals[k + 1])) < 1.0 - NORMAL_ALIGN_TOL
        if distinct:
            folds.append((k, float(a0) if np.isfinite(a0) else np.inf))
        else:
            non_generic.append((k, float(a0) if np.isfinite(a0) else np.inf))
    groups = 1
    for k in range(chain.n - 1):
        if abs(float(normals[k] @ normals[k + 1])) < 1.0 - NORMAL_ALIGN_TOL:
            groups += 1
    return FoldReport(
        folds=tuple(folds),
        count=len(folds),
        hyperplane_count=groups,
        non_generic=tuple(non_generic),
    )


def _origin_hinge_normals(chain, theta):
    """Unit normals of the hyperplanes through the origin and each hinge."""
    poses = _body_poses(chain, theta)
    normals = np.empty((chain.n, chain.dimension))
    for i in range(chain.n):
        base_w = poses[i].apply(chain.feet[i])
        dirs_w = chain.hinges[i].directions @ poses[i].rot.T
        rel = base_w
        rel_perp = rel - dirs_w.T @ (dirs_w @ rel) if dirs_w.size else rel
        nrm = np.linalg.norm(rel_perp)
        if nrm < 1e-12 * chain.scale:
            raise DegenerateHyperplane(f"hinge {i} hull passes through the origin")
        rows = np.vstack([dirs_w, rel_perp[None, :] / nrm])
        normals[i] = _complement_unit(rows, chain.dimension)
    return normals


def orbit(pchain, theta, max_size=4096):
    """Closure of a configuration under all marked-point/hinge involutions.

    Non-flat critical configurations get orbits of cardinality 2^c with c
    the fold count; flat ones are fixed points and give singletons.
    Involutions whose reflection hyperplane is degenerate at an orbit
    member are skipped.
    """
    pchain = _as_panel(pchain)
    chain = pchain.chain
    start = normalize_theta(chain, theta)
    members = [start]
    queue = [start]
    while queue:
        current = queue.pop()
        for anchor in ("head", "tail"):
            for k in range(chain.n):
                try:
                    image = involution(pchain, current, anchor, k)
                except DegenerateHyperplane:
                    continue
                if any(torus_distance(image, m) <= DEDUP_TOL for m in members):
                    continue
                members.append(image)
                queue.append(image)
                if len(members) > max_size:
                    raise Inconsistent("orbit exceeded the enumeration guard")
    members.sort(key=lambda t: tuple(np.round(t, 9)))
    return members


@dataclass(frozen=True)
class MinReport:
    """Global-minimum report for a panel chain census.

    ``kind`` is "zero" when the zero fiber is hit (minimum 0), "positive"
    when arc-ordered minimum records exist, or "none" when the census shows
    neither.
    """

    kind: str
    min_value: float | None
    records: tuple
    zero_witness: object


def min_candidates(pchain, census):
    """Filter a census for panel-chain global-minimum candidates.

    Records whose intersection parameters traverse the complementary
    projective arc in natural order are global minima for panel chains,
    and then the zero fiber must be empty; finding both at once indicates
    a solver misclassification and raises Inconsistent.
    """
    _as_panel(pchain)
    ordered = [
        r
        for r in census.isolated
        if r.params_a is not None and min_ordered(r.params_a)
    ]
    zero = census.zero_fiber
    if ordered and zero:
        raise Inconsistent(
            "census contains both an arc-ordered minimum and a zero-fiber point"
        )
    if zero:
        return MinReport(kind="zero", min_value=0.0, records=(), zero_witness=zero[0])
    if ordered:
        best = min(ordered, key=lambda r: r.value)
        return MinReport(
            kind="positive",
            min_value=best.value,
            records=tuple(ordered),
            zero_witness=None,
        )
    return MinReport(kind="none", min_value=None, records=(), zero_witness=None)
