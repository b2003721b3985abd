"""Unit and parity tests for the hot kernels.

Every kernel has a numba path and a numpy path; the parity tests run both
directly and require agreement to float precision, independent of which
backend the wrappers selected at import.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamrep import _kernels

INF = np.inf

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def _random_ccw_polygon(rng, n=12, scale=1.0):
    ang = np.sort(rng.uniform(0, 2 * np.pi, n))
    rad = rng.uniform(0.3, 1.0, n) * scale
    pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    from hamrep.geometry import ConvexBody

    return ConvexBody.from_points(pts).verts


# ------------------------------------------------------------
# poly_point_dist
# ------------------------------------------------------------

def test_point_dist_outside_edge():
    d, p = _kernels.poly_point_dist(SQUARE, np.array([0.5, 2.0]))
    assert d == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(p, [0.5, 1.0])


def test_point_dist_outside_vertex():
    d, p = _kernels.poly_point_dist(SQUARE, np.array([2.0, 2.0]))
    assert d == pytest.approx(np.sqrt(2.0), abs=1e-15)
    assert np.allclose(p, [1.0, 1.0])


def test_point_dist_inside_is_zero():
    d, p = _kernels.poly_point_dist(SQUARE, np.array([0.25, 0.75]))
    assert d == 0.0
    assert np.allclose(p, [0.25, 0.75])


def test_point_dist_degenerate_segment_and_point():
    seg = np.array([[0.0, 0.0], [2.0, 0.0]])
    d, p = _kernels.poly_point_dist(seg, np.array([1.0, 1.0]))
    assert d == pytest.approx(1.0)
    assert np.allclose(p, [1.0, 0.0])
    pt = np.array([[3.0, 4.0]])
    d, p = _kernels.poly_point_dist(pt, np.array([0.0, 0.0]))
    assert d == pytest.approx(5.0)


# ------------------------------------------------------------
# clipping
# ------------------------------------------------------------

def _shoelace(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _unit_dirs(n):
    ang = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(ang), np.sin(ang)])


def test_clip_huge_ball_recovers_body():
    from hamrep.geometry import edge_halfplanes

    normals, offsets = edge_halfplanes(SQUARE)
    out = _kernels.clip_ball_by_edges(normals, offsets, np.array([0.5, 0.5]),
                                      100.0, _unit_dirs(64))
    assert _shoelace(out) == pytest.approx(1.0, abs=1e-9)


def test_clip_ball_inside_body_keeps_ballgon():
    from hamrep.geometry import edge_halfplanes

    normals, offsets = edge_halfplanes(SQUARE)
    dirs = _unit_dirs(64)
    out = _kernels.clip_ball_by_edges(normals, offsets, np.array([0.5, 0.5]),
                                      0.2, dirs)
    assert out.shape[0] == 64
    assert np.allclose(np.linalg.norm(out - [0.5, 0.5], axis=1), 0.2)


def test_clip_disjoint_ball_is_empty():
    from hamrep.geometry import edge_halfplanes

    normals, offsets = edge_halfplanes(SQUARE)
    out = _kernels.clip_ball_by_edges(normals, offsets, np.array([5.0, 0.5]),
                                      0.5, _unit_dirs(32))
    assert out.shape[0] == 0


# ------------------------------------------------------------
# Steiner sweep
# ------------------------------------------------------------

def test_steiner_translation_equivariant():
    dirs = _unit_dirs(256)
    rng = np.random.default_rng(7)
    poly = _random_ccw_polygon(rng)
    s0 = _kernels.steiner_quad_polygon(poly, dirs[:, 0], dirs[:, 1])
    s1 = _kernels.steiner_quad_polygon(poly + [3.0, -2.0], dirs[:, 0], dirs[:, 1])
    assert np.allclose(s1 - s0, [3.0, -2.0], atol=1e-12)


def test_steiner_of_regular_polygon_is_center():
    dirs = _unit_dirs(512)
    ang = 2.0 * np.pi * np.arange(48) / 48
    poly = np.column_stack([2.0 + np.cos(ang), -1.0 + np.sin(ang)])
    s = _kernels.steiner_quad_polygon(poly, dirs[:, 0], dirs[:, 1])
    assert np.allclose(s, [2.0, -1.0], atol=1e-12)


# ------------------------------------------------------------
# conjugate / episum / interpolation / DP
# ------------------------------------------------------------

def test_conjugate_max_by_hand():
    vs = np.array([-1.0, 0.0, 1.0])
    gs = np.array([1.0, 0.0, 1.0])  # |v| on three nodes
    ps = np.array([-2.0, 0.0, 0.5, 2.0])
    out = _kernels.conjugate_max(vs, gs, ps)
    assert np.allclose(out, [1.0, 0.0, 0.0, 1.0])


def test_conjugate_max_skips_infinite_nodes():
    vs = np.array([0.0, 1.0])
    gs = np.array([0.0, INF])
    out = _kernels.conjugate_max(vs, gs, np.array([10.0]))
    assert out[0] == 0.0


def test_episum_by_hand():
    phi = np.array([0.0, 2.0, INF])
    psi = np.array([1.0, 0.0])
    out = _kernels.episum(phi, psi)
    assert np.allclose(out[:3], [1.0, 0.0, 2.0])
    assert out[3] == INF


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=12),
       st.lists(st.floats(-10, 10), min_size=1, max_size=12))
@settings(deadline=None, max_examples=50)
def test_episum_commutes(a, b):
    phi = np.array(a)
    psi = np.array(b)
    assert np.array_equal(_kernels.episum(phi, psi), _kernels.episum(psi, phi))


@given(st.lists(st.one_of(st.floats(-5, 5), st.just(INF)),
                min_size=1, max_size=10))
@settings(deadline=None, max_examples=50)
def test_episum_with_zero_indicator_is_identity(a):
    phi = np.array(a)
    out = _kernels.episum(phi, np.array([0.0]))
    assert np.array_equal(out, phi)


def test_interp1_inf_nodes_and_propagation():
    vals = np.array([0.0, INF, 2.0])
    assert _kernels.interp1_inf(0.0, 1.0, vals, 0.0) == 0.0
    assert _kernels.interp1_inf(0.0, 1.0, vals, 1.0) == INF  # node hit
    assert _kernels.interp1_inf(0.0, 1.0, vals, 0.5) == INF  # touched inf
    assert _kernels.interp1_inf(0.0, 1.0, vals, 2.0) == 2.0
    assert _kernels.interp1_inf(0.0, 1.0, vals, 2.5) == INF  # out of range
    smooth = np.array([0.0, 1.0, 4.0])
    assert _kernels.interp1_inf(0.0, 1.0, smooth, 1.5) == pytest.approx(2.5)


def test_dp_backward_step_picks_cheapest_feasible():
    xs = np.linspace(-1.0, 1.0, 5)
    moves = np.tile(np.array([-1.0, 0.0, 1.0]), (5, 1))
    costs = np.tile(np.array([1.0, 0.5, 1.0]), (5, 1))
    vnext = np.abs(xs)  # distance-to-zero terminal
    v, arg = _kernels.dp_backward_step(xs, moves, costs, vnext, 0.5)
    # at x = 1: moving left costs 0.5*1 and lands at 0.5 -> 1.0 total;
    # staying costs 0.25 + 1.0
    assert v[4] == pytest.approx(1.0)
    assert arg[4] == 0
    assert v[2] == pytest.approx(0.25)  # stay at 0
    assert arg[2] == 1


def test_dp_backward_step_infeasible_marks_inf():
    xs = np.linspace(0.0, 1.0, 3)
    moves = np.full((3, 1), 10.0)  # always leaves the grid
    costs = np.zeros((3, 1))
    v, arg = _kernels.dp_backward_step(xs, moves, costs, np.zeros(3), 1.0)
    assert np.all(np.isinf(v))
    assert np.all(arg == -1)


# ------------------------------------------------------------
# backend parity
# ------------------------------------------------------------

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA,
                                 reason="numba backend disabled")


@needs_numba
def test_parity_poly_point_dist(rng):
    poly = _random_ccw_polygon(rng)
    xs = np.ascontiguousarray(poly[:, 0])
    ys = np.ascontiguousarray(poly[:, 1])
    for _ in range(50):
        q = rng.uniform(-2, 2, 2)
        a = _kernels._poly_point_dist_k(xs, ys, q[0], q[1])
        b = _kernels._poly_point_dist_np(xs, ys, q[0], q[1])
        assert np.allclose(a, b, atol=1e-12)


@needs_numba
def test_parity_construct_batch(rng):
    from hamrep.geometry import edge_halfplanes

    poly = _random_ccw_polygon(rng, n=20, scale=2.0)
    normals, offsets = edge_halfplanes(poly)
    controls = rng.uniform(-1, 1, size=(60, 2))
    controls /= np.maximum(1.0, np.linalg.norm(controls, axis=1))[:, None]
    dirs = _unit_dirs(64)
    qd = _unit_dirs(256)
    steiner = _kernels.steiner_quad_polygon(poly, qd[:, 0], qd[:, 1])
    outs = []
    for fn in (_kernels._construct_batch_k, _kernels._construct_batch_np):
        out = np.empty((controls.shape[0], 4))
        fn(np.ascontiguousarray(poly[:, 0]), np.ascontiguousarray(poly[:, 1]),
           np.ascontiguousarray(normals[:, 0]), np.ascontiguousarray(normals[:, 1]),
           np.ascontiguousarray(offsets), 3.0,
           np.ascontiguousarray(controls[:, 0]), np.ascontiguousarray(controls[:, 1]),
           np.ascontiguousarray(qd[:, 0]), np.ascontiguousarray(qd[:, 1]),
           np.ascontiguousarray(dirs[:, 0]), np.ascontiguousarray(dirs[:, 1]),
           1e-12, steiner[0], steiner[1], out)
        outs.append(out)
    assert np.allclose(outs[0], outs[1], atol=1e-10)


@needs_numba
def test_parity_conjugate_and_episum(rng):
    vs = np.linspace(-2, 2, 101)
    gs = vs ** 2
    gs[::17] = INF
    ps = np.linspace(-3, 3, 57)
    out_a = np.empty(57)
    out_b = np.empty(57)
    _kernels._conjugate_max_k(vs, gs, ps, out_a)
    _kernels._conjugate_max_np(vs, gs, ps, out_b)
    assert np.array_equal(out_a, out_b)

    phi = rng.uniform(-1, 1, 40)
    psi = rng.uniform(-1, 1, 30)
    phi[::7] = INF
    out_a = np.empty(69)
    out_b = np.empty(69)
    _kernels._episum_k(phi, psi, out_a)
    _kernels._episum_np(phi, psi, out_b)
    assert np.array_equal(out_a, out_b)


@needs_numba
def test_parity_dp_step(rng):
    xs = np.linspace(-1, 1, 21)
    moves = rng.uniform(-1, 1, size=(21, 7))
    costs = rng.uniform(0, 2, size=(21, 7))
    costs[rng.uniform(size=costs.shape) < 0.2] = INF
    vnext = rng.uniform(0, 1, 21)
    vnext[::5] = INF
    va = np.empty(21)
    vb = np.empty(21)
    aa = np.empty(21, dtype=np.int64)
    ab = np.empty(21, dtype=np.int64)
    _kernels._dp_step_k(xs, moves, costs, vnext, 0.05, va, aa)
    _kernels._dp_step_np(xs, moves, costs, vnext, 0.05, vb, ab)
    assert np.allclose(va, vb, atol=1e-13)
    assert np.array_equal(aa, ab)
