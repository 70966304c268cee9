"""Shared deterministic chain generators for the test suite."""

import numpy as np

import hingechain as hc
from hingechain.errors import HingeChainError


def random_subspace(rng, d, min_foot=0.25):
    """Random codimension-2 subspace whose foot stays off the origin."""
    while True:
        base = rng.normal(size=d)
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        dirs = q[:, : d - 2].T
        sub = hc.AffineSubspace(base, dirs)
        if np.linalg.norm(hc.closest_point(sub, np.zeros(d))) > min_foot:
            return sub


def random_chain(rng, d, n):
    """Generic random chain; resamples until validation passes."""
    while True:
        try:
            hinges = [random_subspace(rng, d) for _ in range(n)]
            x = rng.normal(size=d)
            while np.linalg.norm(x) < 0.3:
                x = rng.normal(size=d)
            return hc.ChainSpec(d, hinges, x)
        except HingeChainError:
            continue


def planar_chain(positions, endpoint_x):
    """Planar chain with point hinges on the x-axis."""
    hinges = [hc.AffineSubspace([float(c), 0.0], []) for c in positions]
    return hc.ChainSpec(2, hinges, [float(endpoint_x), 0.0])


def random_flat_planar_chain(rng, n, margin=0.15):
    """Random planar chain with all hinges and the end-point on the x-axis.

    Rejection keeps every flat configuration generic: nonzero value, hinges
    off the origin, and well-separated intersection parameters, so index
    formulas apply without ties.
    """
    while True:
        vals = rng.uniform(-2.2, 2.8, size=n + 1)
        if np.min(np.abs(vals)) < margin:
            continue
        if np.min(np.abs(np.diff(vals))) < margin:
            continue
        try:
            chain = planar_chain(vals[:n], vals[n])
        except HingeChainError:
            continue
        if _flat_configs_generic(chain):
            return chain


def _flat_configs_generic(chain, margin=0.02):
    n = chain.n
    for bits in range(2**n):
        theta = np.array([np.pi if (bits >> j) & 1 else 0.0 for j in range(n)])
        e = hc.end_point(chain, theta)
        if abs(e[0]) < margin:
            return False
        positions = np.array(
            [hc.hinge_placement(chain, theta, i).base[0] for i in range(n)]
        )
        if np.min(np.abs(positions)) < margin:
            return False
        a = positions / e[0]
        inv = 1.0 / a
        entries = np.concatenate([[1.0 - inv[-1]], inv[:0:-1] - inv[-2::-1]])
        if np.min(np.abs(entries)) < margin:
            return False
    return True


def random_flat_panel_chain(rng, n, min_foot=0.2):
    """Random 3D panel chain with a flat reference in the z = 0 plane."""
    while True:
        hinges = []
        ok = True
        for _ in range(n):
            base = np.array([rng.uniform(-2.0, 2.5), rng.uniform(-2.0, 2.5), 0.0])
            phi = rng.uniform(0.0, np.pi)
            sub = hc.AffineSubspace(base, [[np.cos(phi), np.sin(phi), 0.0]])
            if np.linalg.norm(hc.closest_point(sub, np.zeros(3))) < min_foot:
                ok = False
                break
            hinges.append(sub)
        if not ok:
            continue
        x = np.array([rng.uniform(-2.0, 2.5), rng.uniform(-2.0, 2.5), 0.0])
        if np.linalg.norm(x) < 0.3:
            continue
        try:
            chain = hc.ChainSpec(3, hinges, x)
        except HingeChainError:
            continue
        normals = np.tile([0.0, 0.0, 1.0], (n + 1, 1))
        return hc.PanelChainSpec(chain, normals)


def fold_chain_c1(gamma=0.6):
    """Panel chain whose reference is a one-fold global maximum.

    Both hinges pass through (2, 0, 0) on the head-to-tail segment to
    (4, 0, 0); the middle panel is the x = 2 plane, so the head and tail
    panels meet it at an angle gamma.
    """
    h1 = hc.AffineSubspace([2.0, 0.0, 0.0], [[0.0, 1.0, 0.0]])
    h2 = hc.AffineSubspace([2.0, 0.0, 0.0], [[0.0, np.cos(gamma), np.sin(gamma)]])
    chain = hc.ChainSpec(3, [h1, h2], [4.0, 0.0, 0.0])
    normals = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, -np.sin(gamma), np.cos(gamma)]]
    return hc.PanelChainSpec(chain, normals)


def fold_chain_c2(g1=0.5, g2=0.9):
    """Panel chain whose reference is a two-fold global maximum.

    Hinges 0, 1 pass through (3, 0, 0) and hinges 2, 3 through (7, 0, 0) on
    the segment to (10, 0, 0); the panel planes tilt by g1 at the first fold
    and by g2 at the second.
    """
    c1, s1 = np.cos(g1), np.sin(g1)
    c2, s2 = np.cos(g2), np.sin(g2)
    h1 = hc.AffineSubspace([3.0, 0.0, 0.0], [[0.0, 1.0, 0.0]])
    h2 = hc.AffineSubspace([3.0, 0.0, 0.0], [[0.0, c1, s1]])
    h3 = hc.AffineSubspace([7.0, 0.0, 0.0], [[0.0, c1, s1]])
    h4 = hc.AffineSubspace([7.0, 0.0, 0.0], [[0.0, c2, s2]])
    chain = hc.ChainSpec(3, [h1, h2, h3, h4], [10.0, 0.0, 0.0])
    normals = [
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
        [0.0, -s1, c1],
        [1.0, 0.0, 0.0],
        [0.0, -s2, c2],
    ]
    return hc.PanelChainSpec(chain, normals)
