import numpy as np
import pytest

import hingechain as hc
from hingechain.errors import NoConvergence, PointOffHinge

from conftest import fold_chain_c1, planar_chain, random_chain

SQ2 = np.sqrt(2.0)


def golden_section(fn, lo, hi, iters=200):
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def test_arc_length_collinear():
    chain = planar_chain([1.0, 2.0], 3.0)
    assert hc.arc_length(chain, chain.feet) == pytest.approx(3.0)


def test_arc_length_two_segments():
    h1 = hc.line([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    chain = hc.ChainSpec(3, [h1], [2.0, 0.0, 0.0])
    assert hc.arc_length(chain, np.array([[1.0, 1.0, 0.0]])) == pytest.approx(2 * SQ2)


def test_arc_length_point_off_hinge():
    h1 = hc.line([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    chain = hc.ChainSpec(3, [h1], [2.0, 0.0, 0.0])
    with pytest.raises(PointOffHinge):
        hc.arc_length(chain, np.array([[1.5, 0.0, 0.0]]))


def test_arc_length_continuous_at_coincident_points():
    pc = fold_chain_c1()
    chain = pc.chain
    shared = np.array([2.0, 0.0, 0.0])
    base_len = hc.arc_length(chain, np.vstack([shared, shared]))
    assert base_len == pytest.approx(4.0)
    for eps in (1e-3, 1e-6, 1e-9):
        nearby = np.vstack([shared + eps * chain.hinges[0].directions[0], shared])
        assert abs(hc.arc_length(chain, nearby) - base_len) < 3 * eps


def test_single_hinge_min_symmetric_reflection():
    hinge = hc.line([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    a = hc.single_hinge_min(hinge, np.zeros(3), np.array([2.0, 0.0, 0.0]))
    assert np.allclose(a, [1.0, 0.0, 0.0], atol=1e-12)


def test_single_hinge_min_point_on_hinge():
    hinge = hc.line([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    p = np.array([1.0, 2.0, 0.0])  # on the hinge
    q = np.array([4.0, -1.0, 2.0])
    a = hc.single_hinge_min(hinge, p, q)
    assert np.allclose(a, p, atol=1e-12)
    # golden-section oracle over the hinge parameter agrees
    def cost(s):
        pt = hinge.base + s * hinge.directions[0]
        return np.linalg.norm(p - pt) + np.linalg.norm(pt - q)

    s_star = golden_section(cost, -10.0, 10.0)
    oracle = hinge.base + s_star * hinge.directions[0]
    assert cost(2.0) >= cost(s_star) - 1e-9
    assert np.linalg.norm(a - oracle) < 1e-5


def test_single_hinge_min_vertical_line():
    hinge = hc.line([0.0, 0.0, 1.0], [0.0, 1.0, 0.0])
    a = hc.single_hinge_min(hinge, np.zeros(3), np.array([0.0, 0.0, 2.0]))
    assert np.allclose(a, [0.0, 0.0, 1.0], atol=1e-12)


def test_single_hinge_min_against_golden_section():
    rng = np.random.default_rng(41)
    for _ in range(25):
        base = rng.normal(size=3)
        q_mat, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        hinge = hc.AffineSubspace(base, q_mat[:, :1].T)
        p, q = rng.normal(size=(2, 3)) * 2.0

        def cost(s):
            pt = hinge.base + s * hinge.directions[0]
            return np.linalg.norm(p - pt) + np.linalg.norm(pt - q)

        a = hc.single_hinge_min(hinge, p, q)
        s_best = golden_section(cost, -20.0, 20.0)
        s_a = float((a - hinge.base) @ hinge.directions[0])
        assert cost(s_a) <= cost(s_best) + 1e-9


def test_single_hinge_min_planar_point():
    hinge = hc.AffineSubspace([1.0, 1.0], [])
    a = hc.single_hinge_min(hinge, np.zeros(2), np.array([3.0, 0.0]))
    assert np.allclose(a, [1.0, 1.0])


def test_min_polygonal_arc_straight_chain():
    chain = planar_chain([1.0, 2.0], 3.0)
    witness = hc.min_polygonal_arc(chain)
    assert witness.length == pytest.approx(3.0, abs=1e-12)
    assert np.allclose(witness.points, chain.feet, atol=1e-9)


def test_min_polygonal_arc_single_hinge_circle_closed_form():
    h1 = hc.line([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    x = np.array([2.5, 0.5, 0.0])
    chain = hc.ChainSpec(3, [h1], x)
    witness = hc.min_polygonal_arc(chain)
    # maximum over the end-point circle in closed form
    t = chain.feet[0]
    rel = x - t
    d_comp = (rel @ chain.hinges[0].directions[0]) * chain.hinges[0].directions[0]
    radius = np.linalg.norm(rel - d_comp)
    expected = np.sqrt((np.linalg.norm(t) + radius) ** 2 + np.linalg.norm(d_comp) ** 2)
    assert witness.length == pytest.approx(expected, rel=1e-12)


def test_min_polygonal_arc_no_convergence():
    chain = planar_chain([1.0, 2.0], 3.0)
    with pytest.raises(NoConvergence) as err:
        hc.min_polygonal_arc(chain, max_sweeps=0)
    assert err.value.witness is not None


def test_min_polygonal_arc_monotone_sweeps():
    rng = np.random.default_rng(43)
    chain = random_chain(rng, 3, 3)
    lengths = []
    points = chain.feet.copy()
    from hingechain.reach import _polyline_length, single_hinge_min as shm

    lengths.append(_polyline_length(points, chain.endpoint))
    for _ in range(40):
        for i in range(chain.n):
            left = points[i - 1] if i > 0 else np.zeros(3)
            right = points[i + 1] if i < chain.n - 1 else chain.endpoint
            points[i] = shm(chain.hinges[i], left, right)
        lengths.append(_polyline_length(points, chain.endpoint))
    diffs = np.diff(lengths)
    assert np.all(diffs <= 1e-12 * chain.scale)


def test_planar_closed_form_reach():
    rng = np.random.default_rng(47)
    for _ in range(10):
        positions = rng.uniform(-2, 2, size=3)
        while np.min(np.abs(positions)) < 0.2 or np.min(np.abs(np.diff(positions))) < 0.2:
            positions = rng.uniform(-2, 2, size=3)
        x = rng.uniform(-2, 2)
        while abs(x) < 0.2 or abs(x - positions[-1]) < 0.2:
            x = rng.uniform(-2, 2)
        try:
            chain = planar_chain(positions, x)
        except hc.errors.HingeChainError:
            continue
        expected = (
            abs(positions[0])
            + np.sum(np.abs(np.diff(positions)))
            + abs(x - positions[-1])
        )
        witness = hc.min_polygonal_arc(chain)
        assert witness.length == pytest.approx(expected, rel=1e-12)
        assert np.allclose(witness.points, chain.feet, atol=1e-12)


def test_straighten_already_straight():
    chain = planar_chain([1.0, 2.0], 3.0)
    witness = hc.min_polygonal_arc(chain)
    theta = hc.straighten(chain, witness)
    assert np.allclose(np.minimum(theta, 2 * np.pi - theta), 0.0, atol=1e-9)


def test_straighten_from_folded_reference():
    base = planar_chain([1.0, 2.1], 3.3)
    folded = hc.rebase(base, [2.0, 1.2])
    result = hc.max_reach(folded)
    assert result.max_distance == pytest.approx(3.3, rel=1e-9)
    f_star = hc.squared_distance(folded, result.theta_star)
    assert np.sqrt(f_star) == pytest.approx(3.3, rel=1e-9)
    assert result.certification.certified


def test_straighten_with_fold():
    pc = fold_chain_c1()
    chain = pc.chain
    result = hc.max_reach(chain)
    assert result.max_distance == pytest.approx(4.0, rel=1e-12)
    assert result.certification.certified
    a = result.ordering_params
    assert a is not None and abs(a[0] - a[1]) < 1e-8


def test_straighten_fold_log_records_alternative():
    from hingechain.geom import rotate_in_plane

    pc = fold_chain_c1()
    chain = pc.chain
    witness = hc.min_polygonal_arc(chain)
    log = []
    theta = hc.straighten(chain, witness, fold_log=log)
    assert len(log) == 1
    hinge, chosen, alternative = log[0]
    assert abs(chosen) <= abs(alternative)
    assert (chosen - alternative) % (2 * np.pi) != 0.0
    # both recorded angles solve the fold alignment equation: the rotated
    # outgoing direction has the same hinge-direction component as the
    # incoming one
    out_hat = (chain.endpoint - witness.points[hinge]) / np.linalg.norm(
        chain.endpoint - witness.points[hinge]
    )
    in_vec = witness.points[hinge - 1]
    in_hat = in_vec / np.linalg.norm(in_vec)
    drow = chain.hinges[hinge - 1].directions[0]
    u, w = chain.plane_u[hinge], chain.plane_w[hinge]
    for angle in (chosen, alternative):
        rotated = rotate_in_plane(u, w, angle, out_hat)
        assert abs(float(rotated @ drow) - float(in_hat @ drow)) < 1e-9
    # the mirror maximum reached through the flip is the other orbit member
    members = hc.orbit(pc, theta)
    assert len(members) == 2


def test_max_min_identity_random():
    rng = np.random.default_rng(53)
    for _ in range(8):
        chain = random_chain(rng, 3, int(rng.integers(1, 4)))
        result = hc.max_reach(chain)
        f_star = hc.squared_distance(chain, result.theta_star)
        assert (
            abs(np.sqrt(f_star) - result.max_distance) <= 1e-8 * chain.scale
        )


def test_reach_lower_bound_property():
    rng = np.random.default_rng(59)
    chain = random_chain(rng, 3, 3)
    result = hc.max_reach(chain)
    for _ in range(50):
        theta = rng.uniform(0, 2 * np.pi, 3)
        assert (
            np.sqrt(hc.squared_distance(chain, theta))
            <= result.max_distance + 1e-8 * chain.scale
        )


def test_certify_examples():
    chain = planar_chain([1.0, 2.0, 3.0], 4.0)
    assert hc.certify_global_max(chain, np.zeros(3)).certified
    rejected = hc.certify_global_max(chain, [0.0, 0.0, np.pi])
    assert not rejected.certified
    assert "ordering" in rejected.reason
    noncritical = hc.certify_global_max(chain, [0.3, 0.5, 0.1])
    assert not noncritical.certified


def test_certify_rejects_zero_value():
    chain = planar_chain([1.0, 2.0], 3.0)
    theta = np.array([2 * np.pi / 3, 2 * np.pi / 3])
    cert = hc.certify_global_max(chain, theta)
    assert not cert.certified
    assert "zero" in cert.reason


def test_reach_witness_on_hinges():
    rng = np.random.default_rng(61)
    chain = random_chain(rng, 4, 3)
    witness = hc.min_polygonal_arc(chain)
    for i, p in enumerate(witness.points):
        assert hc.distance_to(chain.hinges[i], p) < 1e-10 * chain.scale
    assert hc.arc_length(chain, witness.points) == pytest.approx(
        witness.length, abs=1e-12 * chain.scale
    )
