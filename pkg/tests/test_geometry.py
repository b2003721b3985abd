"""Convex body canonicalization, Steiner selection, projection, and caps."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamrep import geometry as ge


def _random_body(rng, n=15, scale=1.0):
    return ge.ConvexBody.from_points(rng.uniform(-scale, scale, size=(n, 2)))


# ------------------------------------------------------------
# hulls and canonical form
# ------------------------------------------------------------

def test_hull_2d_square_with_noise_points():
    pts = [[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [0.5, 0.0], [0, 0]]
    body = ge.ConvexBody.from_points(pts)
    assert body.nverts == 4
    assert np.allclose(body.verts, [[0, 0], [1, 0], [1, 1], [0, 1]])


def test_hull_2d_collinear_collapses_to_segment():
    body = ge.ConvexBody.from_points([[0, 0], [1, 1], [2, 2], [0.5, 0.5]])
    assert body.nverts == 2
    assert np.allclose(body.verts, [[0, 0], [2, 2]])


def test_hull_1d_and_singletons():
    assert ge.ConvexBody.from_points([[3.0], [1.0], [2.0]]).verts.tolist() == [[1.0], [3.0]]
    assert ge.ConvexBody.from_points([[2.0], [2.0]]).nverts == 1
    assert ge.ConvexBody.from_points([[1.0, 2.0], [1.0, 2.0]]).nverts == 1


def test_hull_3d_tetrahedron_drops_interior():
    pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0.2, 0.2, 0.2]]
    body = ge.ConvexBody.from_points(pts)
    assert body.nverts == 4


def test_hull_3d_planar_set():
    # a square living in the z = 1 plane
    pts = [[0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1], [0.5, 0.5, 1]]
    body = ge.ConvexBody.from_points(pts)
    assert body.nverts == 4
    assert np.allclose(body.verts[:, 2], 1.0)


def test_from_points_rejects_bad_input():
    with pytest.raises(ValueError):
        ge.ConvexBody.from_points(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        ge.ConvexBody.from_points([[np.nan, 0.0]])
    with pytest.raises(ValueError):
        ge.ConvexBody.from_points(np.zeros((2, 4)))


@given(st.integers(3, 30), st.integers(0, 10_000))
@settings(deadline=None, max_examples=40)
def test_hull_idempotent(n, seed):
    rng = np.random.default_rng(seed)
    body = _random_body(rng, n)
    again = ge.ConvexBody.from_points(body.verts)
    assert np.array_equal(body.verts, again.verts)


# ------------------------------------------------------------
# quadratures
# ------------------------------------------------------------

def test_circle_quadrature_basics():
    q = ge.circle_quadrature(128)
    assert q.count == 128
    assert q.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(np.linalg.norm(q.nodes, axis=1), 1.0)


def test_sphere_quadrature_count_and_symmetry():
    q = ge.sphere_quadrature(590)
    assert q.count >= 590
    assert q.weights.sum() == pytest.approx(1.0, abs=1e-12)
    # antipodal symmetry: every node's negation is a node
    d2 = np.sum((q.nodes[:, None, :] + q.nodes[None, :, :]) ** 2, axis=2)
    assert np.max(d2.min(axis=1)) <= 1e-24


def test_sphere_quadrature_integrates_linear_to_zero():
    q = ge.sphere_quadrature(590)
    assert np.allclose(q.weights @ q.nodes, 0.0, atol=1e-14)


def test_quadrature_validation():
    with pytest.raises(ValueError):
        ge.SphereQuadrature(2, np.array([[2.0, 0.0]]), np.array([1.0]))
    with pytest.raises(ValueError):
        ge.SphereQuadrature(2, np.array([[1.0, 0.0]]), np.array([0.7]))


# ------------------------------------------------------------
# support and Steiner
# ------------------------------------------------------------

def test_support_and_vertex():
    body = ge.ConvexBody.from_points([[0, 0], [2, 0], [0, 2]])
    assert ge.support(body, [1.0, 0.0]) == 2.0
    assert np.allclose(ge.support_vertex(body, [1.0, 0.0]), [2, 0])
    # tie along an edge breaks lexicographically
    assert np.allclose(ge.support_vertex(body, [1.0, 1.0]), [0, 2])


def test_steiner_disc_is_center():
    ang = 2 * np.pi * np.arange(64) / 64
    body = ge.ConvexBody.from_points(
        np.column_stack([1.0 + np.cos(ang), 2.0 + np.sin(ang)]))
    assert np.allclose(ge.steiner_point(body), [1.0, 2.0], atol=1e-12)


def test_steiner_singleton_bit_exact():
    body = ge.ConvexBody.from_points([[0.1234567, -9.87654321]])
    s = ge.steiner_point(body)
    assert s[0] == 0.1234567 and s[1] == -9.87654321


def test_steiner_interval_midpoint():
    body = ge.ConvexBody.from_points([[-1.0], [3.0]])
    assert np.allclose(ge.steiner_point(body), [1.0], atol=1e-15)


def test_steiner_tetrahedron_inside():
    body = ge.ConvexBody.from_points([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    s = ge.steiner_point(body)
    _, d = ge.project(s, body)
    assert d <= 1e-6


@given(st.integers(0, 10_000))
@settings(deadline=None, max_examples=40)
def test_steiner_is_a_selection(seed):
    # the quadrature Steiner point stays inside the body
    rng = np.random.default_rng(seed)
    body = _random_body(rng)
    s = ge.steiner_point(body)
    _, d = ge.project(s, body)
    assert d <= 1e-9 * max(1.0, np.abs(body.verts).max())


@given(st.integers(0, 10_000))
@settings(deadline=None, max_examples=30)
def test_steiner_lipschitz_in_hausdorff(seed):
    # |s(K) - s(K')| <= m * H(K, K'): holds exactly for the shared-node
    # quadrature form
    rng = np.random.default_rng(seed)
    a = _random_body(rng)
    b = ge.ConvexBody.from_points(a.verts + rng.normal(0, 0.05, a.verts.shape))
    lhs = np.linalg.norm(ge.steiner_point(a) - ge.steiner_point(b))
    rhs = 2.0 * ge.hausdorff(a, b)
    assert lhs <= rhs + 1e-12


def test_steiner_translation_exact():
    rng = np.random.default_rng(3)
    body = _random_body(rng)
    c = np.array([0.7, -0.3])
    s0 = ge.steiner_point(body)
    s1 = ge.steiner_point(body.translate(c))
    assert np.allclose(s1, s0 + c, atol=1e-12)


# ------------------------------------------------------------
# projection and Hausdorff
# ------------------------------------------------------------

def test_project_square_cases():
    body = ge.ConvexBody.from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    p, d = ge.project([0.5, 0.5], body)
    assert d == 0.0
    p, d = ge.project([2.0, 0.5], body)
    assert d == pytest.approx(1.0) and np.allclose(p, [1.0, 0.5])
    p, d = ge.project([-3.0, -4.0], body)
    assert d == pytest.approx(5.0) and np.allclose(p, [0.0, 0.0])


def test_project_interval_and_3d():
    seg = ge.ConvexBody.from_points([[-1.0], [1.0]])
    p, d = ge.project([2.5], seg)
    assert p[0] == 1.0 and d == 1.5
    tet = ge.ConvexBody.from_points([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    p, d = ge.project([0.2, 0.2, 0.2], tet)
    assert d == 0.0
    p, d = ge.project([0.0, 0.0, -2.0], tet)
    assert d == pytest.approx(2.0) and np.allclose(p, [0, 0, 0])


def test_project_planar_3d_body():
    square_z = ge.ConvexBody.from_points([[0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]])
    p, d = ge.project([0.5, 0.5, 3.0], square_z)
    assert d == pytest.approx(2.0)
    assert np.allclose(p, [0.5, 0.5, 1.0])


def test_hausdorff_nested_squares():
    inner = ge.ConvexBody.from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    outer = ge.ConvexBody.from_points([[-1, -1], [2, -1], [2, 2], [-1, 2]])
    assert ge.directed_hausdorff(inner, outer) == 0.0
    assert ge.directed_hausdorff(outer, inner) == pytest.approx(np.sqrt(2.0))
    assert ge.hausdorff(inner, outer) == pytest.approx(np.sqrt(2.0))


def test_hausdorff_translate_is_shift_norm():
    rng = np.random.default_rng(5)
    body = _random_body(rng)
    shifted = body.translate([0.3, 0.4])
    assert ge.hausdorff(body, shifted) == pytest.approx(0.5, abs=1e-12)


# ------------------------------------------------------------
# caps
# ------------------------------------------------------------

def test_edge_halfplanes_contain_polygon():
    rng = np.random.default_rng(11)
    body = _random_body(rng)
    normals, offsets = ge.edge_halfplanes(body.verts)
    slack = body.verts @ normals.T - offsets[None, :]
    assert np.max(slack) <= 1e-12


def test_edge_halfplanes_pin_degenerates():
    seg = np.array([[0.0, 0.0], [1.0, 0.0]])
    normals, offsets = ge.edge_halfplanes(seg)
    # the four half-planes cut exactly the segment: check a few probes
    probes = np.array([[0.5, 0.0], [0.5, 0.1], [1.1, 0.0], [-0.1, 0.0]])
    inside = np.all(probes @ normals.T <= offsets[None, :] + 1e-12, axis=1)
    assert inside.tolist() == [True, False, False, False]


@given(st.integers(0, 10_000))
@settings(deadline=None, max_examples=30)
def test_cap_contains_projection_and_stays_inside(seed):
    rng = np.random.default_rng(seed)
    body = _random_body(rng)
    y = rng.uniform(-3, 3, 2)
    proj, d = ge.project(y, body)
    cap = ge.ball_intersect_P(y, body)
    # projection is a member of the cap
    _, dp = ge.project(proj, cap)
    assert dp <= 1e-9
    # and the cap never leaves the body
    for v in cap.verts:
        _, dv = ge.project(v, body)
        assert dv <= 1e-9
    # vertices stay within the 2d ball
    if d > 1e-12:
        assert np.max(np.linalg.norm(cap.verts - y, axis=1)) <= 2 * d + 1e-9


def test_cap_interior_point_is_singleton():
    body = ge.ConvexBody.from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    cap = ge.ball_intersect_P([0.5, 0.5], body)
    assert cap.nverts == 1


def test_cap_interval_case():
    body = ge.ConvexBody.from_points([[-1.0], [5.0]])
    cap = ge.ball_intersect_P([-2.0], body)
    # d = 1, so the cap is [-1, 0]
    assert np.allclose(cap.verts, [[-1.0], [0.0]])


# ------------------------------------------------------------
# CSV io
# ------------------------------------------------------------

def test_body_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(21)
    body = _random_body(rng)
    path = tmp_path / "body.csv"
    ge.save_body_csv(body, path)
    back = ge.load_body_csv(path)
    assert np.array_equal(body.verts, back.verts)


def test_quadrature_csv_roundtrip(tmp_path):
    q = ge.circle_quadrature(64)
    path = tmp_path / "quad.csv"
    ge.save_quadrature_csv(q, path)
    back = ge.load_quadrature_csv(path)
    assert np.array_equal(q.nodes, back.nodes)
    assert np.allclose(back.weights, 1.0 / 64)
