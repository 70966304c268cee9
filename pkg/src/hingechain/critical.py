"""Critical-configuration census: multistart location, classification by
Hessian index and intersection ordering, the Eulerian-number bound, and the
Euler alternating sum.

Critical configurations with nonzero value are exactly those where the
line from the origin to the end-point meets every hinge (projectively, so
parallelism counts).  The hinge intersection parameters a_k, with hinge k
meeting the line at a_k * x, drive the max/min ordering tests; parallel
hinges are recorded as a_k = inf, for which 1/a_k = 0 slots naturally into
the orderings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from . import grid as grid_mod
from .chain import (
    ZERO_VALUE_REL_TOL,
    end_point,
    gradient,
    hessian_critical,
    hessian_numeric,
    hinge_placement,
    normalize_theta,
    squared_distance_many,
    value_and_gradient_many,
)
from .errors import Degenerate, DegenerateHinge, NotIncident, ZeroValue
from .geom import line, line_meet

TWO_PI = 2.0 * np.pi

# Deduplication threshold: max over coordinates of angular distance.
DEDUP_TOL = 1e-5
# Slack for comparisons between intersection parameters.
ORDER_TOL = 1e-8
# Relative residual gate for "the line meets every hinge".
INCIDENCE_REL_TOL = 1e-6


def eulerian_numbers(n):
    """Row A(n, 0..n-1) of the Eulerian triangle, by the standard recurrence."""
    if n < 1:
        raise ValueError("n must be at least 1")
    row = [1]
    for m in range(2, n + 1):
        prev = row
        row = [1]
        for k in range(1, m - 1):
            row.append((k + 1) * prev[k] + (m - k) * prev[k - 1])
        row.append(1)
    return row


def eulerian_bound(n, d):
    """Upper bound 2^n * sum_k A(n,k) d^k on isolated critical points.

    Exact integer arithmetic, so there is no overflow for any practical n.
    """
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    row = eulerian_numbers(n)
    return 2**n * sum(a * d**k for k, a in enumerate(row))


@dataclass(frozen=True)
class CriticalRecord:
    """A located critical configuration with its classification data."""

    theta: np.ndarray
    value: float
    grad_norm: float
    eigenvalues: np.ndarray
    index: int | None
    kind: str  # "isolated" or "zero_fiber"
    incidence_residuals: np.ndarray | None
    params_a: np.ndarray | None


@dataclass(frozen=True)
class Census:
    """Deduplicated critical records plus index counts and the bound."""

    records: tuple
    counts_by_index: tuple
    bound: int
    n: int
    dimension: int

    @property
    def isolated(self):
        return [r for r in self.records if r.kind == "isolated"]

    @property
    def zero_fiber(self):
        return [r for r in self.records if r.kind == "zero_fiber"]


@dataclass(frozen=True)
class SearchConfig:
    """Multistart search parameters.

    ``starts=None`` uses the default max(200, 20 * eulerian_bound(n, d)),
    which is proportional to the worst-case critical-point count; pass an
    explicit count for large chains.  ``grid`` replaces the low-discrepancy
    starts by the full grid^n lattice (exhaustive-at-resolution searches).
    """

    starts: int | None = None
    seed: int = 0
    tol: float = 1e-9
    grid: int | None = None
    max_iter: int = 80


def torus_distance(a, b):
    """Max over coordinates of the angular distance between configurations."""
    delta = np.abs(np.mod(a - b, TWO_PI))
    return float(np.max(np.minimum(delta, TWO_PI - delta)))


def _polish(chain, seeds, grad_tol, max_iter):
    """Damped batched Newton iteration on grad F = 0.

    Returns the converged configurations.  The Jacobian of the gradient is
    taken by central differences of the analytic gradient, which keeps the
    iteration quadratic while staying independent of the closed-form
    critical Hessian it is later checked against.
    """
    n = chain.n
    th = np.mod(np.asarray(seeds, dtype=float), TWO_PI)
    active = np.arange(th.shape[0])
    converged = []
    fd = 1e-6
    step_cap = 0.5
    for _ in range(max_iter):
        if active.size == 0:
            break
        cur = th[active]
        _, g = value_and_gradient_many(chain, cur)
        gmax = np.max(np.abs(g), axis=1)
        done = gmax <= grad_tol
        if np.any(done):
            converged.append(cur[done])
        keep = ~done
        active = active[keep]
        if active.size == 0:
            break
        cur = cur[keep]
        g = g[keep]
        m = cur.shape[0]
        hess = np.empty((m, n, n))
        for j in range(n):
            tp = cur.copy()
            tm = cur.copy()
            tp[:, j] += fd
            tm[:, j] -= fd
            _, gp = value_and_gradient_many(chain, tp)
            _, gm = value_and_gradient_many(chain, tm)
            hess[:, :, j] = (gp - gm) / (2.0 * fd)
        hess = 0.5 * (hess + hess.transpose(0, 2, 1))
        lam = 1e-10 * (1.0 + np.abs(hess).reshape(m, -1).max(axis=1))
        eye = np.eye(n)
        step = None
        for _ in range(4):
            try:
                step = np.linalg.solve(hess + lam[:, None, None] * eye, g[..., None])[..., 0]
                break
            except np.linalg.LinAlgError:
                lam = lam * 1e4
        if step is None:
            active = np.empty(0, dtype=int)
            break
        smax = np.max(np.abs(step), axis=1)
        shrink = np.minimum(1.0, step_cap / np.maximum(smax, 1e-300))
        step = step * shrink[:, None]
        # Backtrack where the step does not reduce the gradient norm.
        gnorm = np.linalg.norm(g, axis=1)
        scale_f = np.ones(m)
        cand = np.mod(cur - step, TWO_PI)
        for _ in range(3):
            _, gc = value_and_gradient_many(chain, cand)
            bad = np.linalg.norm(gc, axis=1) > gnorm
            if not np.any(bad):
                break
            scale_f[bad] *= 0.25
            cand[bad] = np.mod(cur[bad] - scale_f[bad, None] * step[bad], TWO_PI)
        th[active] = cand
    if not converged:
        return np.empty((0, n))
    return np.concatenate(converged, axis=0)


def polish(chain, theta, tol=1e-9, max_iter=80):
    """Newton-polish one configuration onto the nearest critical point."""
    from .errors import NoConvergence

    seeds = np.asarray(theta, dtype=float)[None, :]
    out = _polish(chain, seeds, tol * chain.scale**2, max_iter)
    if out.shape[0] == 0:
        raise NoConvergence("polishing did not reach the gradient tolerance")
    return np.mod(out[0], TWO_PI)


def incidence_residuals(chain, theta):
    """Distance of each (current) hinge to the head-to-tail line.

    Parallel counts as residual 0 (projective incidence).  Raises ZeroValue
    when F(theta) is below the zero-fiber tolerance, since the line is then
    undefined.
    """
    theta = np.asarray(theta, dtype=float)
    e = end_point(chain, theta)
    f = float(e @ e)
    if f <= ZERO_VALUE_REL_TOL * chain.scale**2:
        raise ZeroValue("end-point at the origin; head-to-tail line undefined")
    ln = line(np.zeros(chain.dimension), e)
    out = np.empty(chain.n)
    for i in range(chain.n):
        inc = line_meet(ln, hinge_placement(chain, theta, i), scale=chain.scale)
        out[i] = 0.0 if inc.kind == "parallel" else inc.residual
    return out


def intersection_params(chain, theta, tol=INCIDENCE_REL_TOL):
    """Parameters a_k with hinge k meeting the head-to-tail line at a_k * x.

    Parallel hinges (projective incidence at infinity) are reported as
    ``inf``.  Raises NotIncident when some hinge misses the line by more
    than ``tol`` times the chain scale, and ZeroValue when F vanishes.
    """
    theta = np.asarray(theta, dtype=float)
    e = end_point(chain, theta)
    f = float(e @ e)
    if f <= ZERO_VALUE_REL_TOL * chain.scale**2:
        raise ZeroValue("end-point at the origin; head-to-tail line undefined")
    norm_e = float(np.sqrt(f))
    ln = line(np.zeros(chain.dimension), e)
    params = np.empty(chain.n)
    for i in range(chain.n):
        inc = line_meet(ln, hinge_placement(chain, theta, i), scale=chain.scale)
        if inc.kind == "parallel":
            params[i] = np.inf
        elif inc.residual > tol * chain.scale:
            raise NotIncident(
                f"hinge {i} misses the head-to-tail line by {inc.residual:.3e}"
            )
        else:
            params[i] = inc.param / norm_e
    return params


def _inverse_params(a):
    """1/a with parallel hinges (inf) mapped to 0 and a ~ 0 to +inf."""
    a = np.asarray(a, dtype=float)
    s = np.empty_like(a)
    for i, val in enumerate(a):
        if np.isinf(val):
            s[i] = 0.0
        elif abs(val) < 1e-12:
            s[i] = np.inf
        else:
            s[i] = 1.0 / val
    return s


def max_ordered(a, tol=ORDER_TOL):
    """True iff 0 <= a_1 <= ... <= a_n <= 1 within slack (ties = folds).

    Encoded via s = 1/a: the segment ordering holds iff s is nonincreasing
    with s_n >= 1.
    """
    s = _inverse_params(a)
    if np.any(np.isnan(s)):
        return False
    if s[-1] < 1.0 - tol:
        return False
    return bool(np.all(s[:-1] >= s[1:] - tol))


def min_ordered(a, tol=ORDER_TOL):
    """True iff the a_k traverse the complementary projective arc in order.

    Covers all three patterns (all negative, split across infinity, all
    above one): via s = 1/a the arc ordering is exactly s nondecreasing
    with s_n <= 1, where a parallel hinge contributes s = 0.
    """
    s = _inverse_params(a)
    if np.any(np.isnan(s)) or np.any(np.isinf(s)):
        return False
    if s[-1] > 1.0 - tol:
        return False
    return bool(np.all(s[1:] >= s[:-1] - tol))


def flat_index(a, tol=ORDER_TOL):
    """Hessian index of a flat critical configuration from its a-parameters.

    Counts the negatives among (1 - 1/a_n, 1/a_n - 1/a_{n-1}, ...,
    1/a_2 - 1/a_1).  Requires finite, nonzero, pairwise distinct a_k;
    raises Degenerate otherwise.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise Degenerate("need a non-empty parameter vector")
    if not np.all(np.isfinite(a)) or np.any(np.abs(a) < tol):
        raise Degenerate("intersection parameters must be finite and nonzero")
    if np.any(np.abs(np.diff(a)) < tol):
        raise Degenerate("consecutive intersection parameters coincide (fold)")
    inv = 1.0 / a
    entries = np.concatenate([[1.0 - inv[-1]], inv[:0:-1] - inv[-2::-1]])
    return int(np.sum(entries < 0.0))


@dataclass(frozen=True)
class Classification:
    kind: str  # global_max_certified | min_candidate | saddle | zero_fiber
    index: int | None = None


def classify(record):
    """Classify a polished critical record by its intersection ordering.

    Segment-ordered records are certified global maxima (the ordering is
    necessary and sufficient); complementary-arc-ordered records are
    reported as minimum candidates; anything else is a saddle labelled by
    its eigenvalue index.
    """
    if record.kind == "zero_fiber":
        return Classification(kind="zero_fiber")
    a = record.params_a
    if a is not None:
        if max_ordered(a):
            return Classification(kind="global_max_certified", index=record.index)
        if min_ordered(a):
            return Classification(kind="min_candidate", index=record.index)
    return Classification(kind="saddle", index=record.index)


def _make_record(chain, theta, value, grad_norm, zero_tol):
    theta = normalize_theta(chain, theta)
    if value <= zero_tol:
        eig = np.linalg.eigvalsh(hessian_numeric(chain, theta))
        return CriticalRecord(
            theta=theta,
            value=value,
            grad_norm=grad_norm,
            eigenvalues=eig,
            index=None,
            kind="zero_fiber",
            incidence_residuals=None,
            params_a=None,
        )
    try:
        eig = np.linalg.eigvalsh(hessian_critical(chain, theta).matrix)
    except DegenerateHinge:
        eig = np.linalg.eigvalsh(hessian_numeric(chain, theta))
    eig_tol = 1e-7 * max(np.max(np.abs(eig)), 1e-300)
    index = int(np.sum(eig < -eig_tol))
    residuals = incidence_residuals(chain, theta)
    try:
        params = intersection_params(chain, theta)
    except NotIncident:
        params = None
    return CriticalRecord(
        theta=theta,
        value=value,
        grad_norm=grad_norm,
        eigenvalues=eig,
        index=index,
        kind="isolated",
        incidence_residuals=residuals,
        params_a=params,
    )


def find_critical(chain, config=None):
    """Multistart census of critical configurations.

    Seeded low-discrepancy starts (or a full lattice with ``config.grid``)
    are polished by damped Newton iteration on the gradient, deduplicated
    by torus distance, and classified.  Zero-fiber hits are collected as
    samples of the critical manifold, without index claims.  The search
    never claims exhaustiveness; results are deterministic for a fixed
    seed.
    """
    if config is None:
        config = SearchConfig()
    n, d = chain.n, chain.dimension
    bound = eulerian_bound(n, d)
    if config.grid is not None:
        seeds = grid_mod.grid_seeds(n, config.grid)
    else:
        starts = config.starts
        if starts is None:
            starts = max(200, 20 * bound)
        sampler = qmc.Halton(d=n, scramble=True, seed=config.seed)
        seeds = sampler.random(starts) * TWO_PI
    grad_tol = config.tol * chain.scale**2
    polished = _polish(chain, seeds, grad_tol, config.max_iter)
    zero_tol = ZERO_VALUE_REL_TOL * chain.scale**2
    records = []
    if polished.shape[0]:
        polished = np.mod(polished, TWO_PI)
        values = squared_distance_many(chain, polished)
        order = np.lexsort(
            tuple(np.round(polished[:, j], 9) for j in range(n - 1, -1, -1))
            + (np.round(values, 9),)
        )
        kept = []
        for idx in order:
            if any(torus_distance(polished[idx], polished[k]) <= DEDUP_TOL for k in kept):
                continue
            kept.append(int(idx))
        for idx in kept:
            g = gradient(chain, polished[idx])
            records.append(
                _make_record(
                    chain,
                    polished[idx],
                    float(values[idx]),
                    float(np.linalg.norm(g)),
                    zero_tol,
                )
            )
    records.sort(key=lambda r: (round(r.value, 9),) + tuple(np.round(r.theta, 9)))
    counts = [0] * (n + 1)
    for r in records:
        if r.kind == "isolated":
            counts[r.index] += 1
    return Census(
        records=tuple(records),
        counts_by_index=tuple(counts),
        bound=bound,
        n=n,
        dimension=d,
    )


def euler_alt_sum(census):
    """Alternating sum sum_i (-1)^(n-i) c_i over isolated records.

    Equals the Euler number of the zero fiber when the census is exhaustive
    and zero is a regular value; exhaustiveness is the caller's claim.
    """
    n = census.n
    return int(sum((-1) ** (n - i) * c for i, c in enumerate(census.counts_by_index)))
