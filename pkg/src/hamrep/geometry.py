"""Convex bodies, sphere quadratures, and the point operations built on them.

Bodies are stored as canonical vertex lists of their convex hull in dimension
m in {1, 2, 3}.  Degenerate bodies (segments, singletons, flat sets) are
first-class: hull construction never assumes full dimension.  Canonical order
is ascending for m = 1, counterclockwise starting from the lexicographically
smallest vertex for m = 2, and plain lexicographic sort for m = 3.

The Steiner point is computed from its spherical support integral
    s_m(K) = m * sum_j w_j p_j sigma(K, p_j)
on a unit-mass quadrature; on uniform circle grids the rule is exactly
translation-equivariant, and singletons are recovered bit-exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

GEOM_EPS = 1e-12  # geometric predicate tolerance
DEFAULT_CIRCLE_NODES = 512
DEFAULT_SPHERE_NODES = 590


# ============================================================
# canonical hulls
# ============================================================

def _hull_1d(points):
    lo = float(np.min(points))
    hi = float(np.max(points))
    if hi - lo <= GEOM_EPS * max(1.0, abs(lo), abs(hi)):
        return np.array([[lo]])
    return np.array([[lo], [hi]])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(points):
    # Andrew monotone chain, strict turns only (every kept vertex extreme).
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if pts.shape[0] == 1:
        return pts
    scale = max(1.0, float(np.abs(pts).max()))
    tol = GEOM_EPS * scale * scale
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 0:
        hull = [pts[0]]
    out = np.array(hull)
    if out.shape[0] > 1 and np.allclose(out[0], out[-1]):
        out = out[:-1]
    # rotate so the lexicographically smallest vertex leads; chain above is
    # already counterclockwise
    start = int(np.lexsort((out[:, 1], out[:, 0]))[0])
    return np.roll(out, -start, axis=0)


def _affine_frame(points):
    # returns (center, basis (3,r), rank) of the affine hull
    center = points.mean(axis=0)
    rel = points - center
    if points.shape[0] == 1:
        return center, np.zeros((points.shape[1], 0)), 0
    u, s, vt = np.linalg.svd(rel, full_matrices=False)
    scale = max(1.0, float(s[0]) if s.size else 1.0)
    rank = int(np.sum(s > 1e-9 * scale))
    return center, vt[:rank].T, rank


def _hull_3d(points):
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if pts.shape[0] <= 2:
        return pts  # point or segment, already lex-sorted by unique
    center, basis, rank = _affine_frame(pts)
    if rank <= 1:
        coords = (pts - center) @ basis if rank == 1 else np.zeros((pts.shape[0], 1))
        i_lo = int(np.argmin(coords[:, 0]))
        i_hi = int(np.argmax(coords[:, 0]))
        sel = pts[[i_lo, i_hi]] if i_lo != i_hi else pts[[i_lo]]
    elif rank == 2:
        coords = (pts - center) @ basis
        hull2 = _hull_2d(coords)
        # map hull vertices back to the original points they came from
        idx = [int(np.argmin(np.sum((coords - h) ** 2, axis=1))) for h in hull2]
        sel = pts[sorted(set(idx))]
    else:
        from scipy.spatial import ConvexHull

        hull = ConvexHull(pts)
        sel = pts[hull.vertices]
    order = np.lexsort((sel[:, 2], sel[:, 1], sel[:, 0]))
    return sel[order]


@dataclass(frozen=True)
class ConvexBody:
    """Convex hull of finitely many points, canonical extreme vertices only."""

    m: int
    verts: np.ndarray = field(repr=False)

    @staticmethod
    def from_points(points) -> "ConvexBody":
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pts.size == 0:
            raise ValueError("empty vertex input")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite vertex input")
        m = pts.shape[1]
        if m == 1:
            verts = _hull_1d(pts[:, 0])
        elif m == 2:
            verts = _hull_2d(pts)
        elif m == 3:
            verts = _hull_3d(pts)
        else:
            raise ValueError(f"unsupported dimension m={m}")
        verts = np.array(verts, dtype=np.float64)
        verts.setflags(write=False)
        return ConvexBody(m=m, verts=verts)

    @property
    def nverts(self) -> int:
        return self.verts.shape[0]

    def translate(self, c) -> "ConvexBody":
        return ConvexBody.from_points(self.verts + np.asarray(c, dtype=np.float64))


@dataclass(frozen=True)
class SphereQuadrature:
    """Unit-sphere quadrature: nodes on S^{m-1}, weights summing to one."""

    m: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        norms = np.linalg.norm(self.nodes, axis=1)
        if not np.all(np.abs(norms - 1.0) <= 1e-12):
            raise ValueError("quadrature nodes must lie on the unit sphere")
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise ValueError("quadrature weights must sum to 1")

    @property
    def count(self) -> int:
        return self.nodes.shape[0]


def circle_quadrature(n: int = DEFAULT_CIRCLE_NODES) -> SphereQuadrature:
    """Uniform-angle trapezoid rule on the circle (m = 2)."""
    if n < 3:
        raise ValueError("need at least 3 circle nodes")
    ang = 2.0 * np.pi * np.arange(n) / n
    nodes = np.column_stack([np.cos(ang), np.sin(ang)])
    nodes[np.abs(nodes) < 2.5e-16] = 0.0
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    return SphereQuadrature(2, nodes, np.full(n, 1.0 / n))


def sphere_quadrature(n: int = DEFAULT_SPHERE_NODES) -> SphereQuadrature:
    """Antipodally symmetric product rule on S^2 with at least n nodes.

    Gauss-Legendre in the polar cosine times a uniform even-count azimuth
    grid; weights are exact products summing to one.
    """
    if n < 8:
        raise ValueError("need at least 8 sphere nodes")
    n_polar = max(2, int(round(np.sqrt(n / 2.0))))
    n_az = 2 * int(np.ceil(n / (2.0 * n_polar)))
    mu, w = np.polynomial.legendre.leggauss(n_polar)
    phi = 2.0 * np.pi * np.arange(n_az) / n_az
    sin_theta = np.sqrt(1.0 - mu ** 2)
    nodes = np.empty((n_polar * n_az, 3))
    weights = np.empty(n_polar * n_az)
    k = 0
    for i in range(n_polar):
        for j in range(n_az):
            nodes[k, 0] = sin_theta[i] * np.cos(phi[j])
            nodes[k, 1] = sin_theta[i] * np.sin(phi[j])
            nodes[k, 2] = mu[i]
            weights[k] = 0.5 * w[i] / n_az
            k += 1
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    weights /= weights.sum()
    return SphereQuadrature(3, nodes, weights)


def pair_quadrature() -> SphereQuadrature:
    """The two-point rule on S^0 (m = 1)."""
    return SphereQuadrature(1, np.array([[-1.0], [1.0]]), np.array([0.5, 0.5]))


def default_quadrature(m: int) -> SphereQuadrature:
    if m == 1:
        return pair_quadrature()
    if m == 2:
        return circle_quadrature()
    if m == 3:
        return sphere_quadrature()
    raise ValueError(f"unsupported dimension m={m}")


# ============================================================
# support / Steiner / projection / Hausdorff
# ============================================================

def support(body: ConvexBody, p) -> float:
    """Support value max_v <p, v> over the body's vertices."""
    p = np.asarray(p, dtype=np.float64)
    return float(np.max(body.verts @ p))


def support_vertex(body: ConvexBody, p) -> np.ndarray:
    """Maximizing vertex; exact ties broken by lexicographic order."""
    p = np.asarray(p, dtype=np.float64)
    dots = body.verts @ p
    cand = np.flatnonzero(dots == dots.max())
    if cand.size == 1:
        return body.verts[cand[0]].copy()
    sub = body.verts[cand]
    order = np.lexsort(tuple(sub[:, k] for k in range(body.m - 1, -1, -1)))
    return sub[order[0]].copy()


def steiner_point(body: ConvexBody, quad: SphereQuadrature | None = None) -> np.ndarray:
    """Quadrature Steiner point m * sum_j w_j p_j sigma(K, p_j)."""
    if quad is None:
        quad = default_quadrature(body.m)
    if quad.m != body.m:
        raise ValueError("quadrature dimension does not match body")
    if body.nverts == 1:
        # the support integral of a singleton collapses to the point itself
        # on any unit-mass symmetric rule; return it bit-exactly
        return body.verts[0].copy()
    if body.m == 2:
        return _kernels.steiner_quad_polygon(body.verts, quad.nodes[:, 0],
                                             quad.nodes[:, 1]) if _is_uniform_circle(quad) \
            else _steiner_dense(body, quad)
    return _steiner_dense(body, quad)


def _is_uniform_circle(quad: SphereQuadrature) -> bool:
    w = quad.weights
    return bool(np.allclose(w, w[0], rtol=0.0, atol=1e-15))


def _steiner_dense(body: ConvexBody, quad: SphereQuadrature) -> np.ndarray:
    center = body.verts.mean(axis=0)
    sup = np.max(quad.nodes @ (body.verts - center).T, axis=1)
    return body.m * ((quad.weights * sup) @ quad.nodes) + center


def project(y, body: ConvexBody):
    """Nearest point of the body and the distance to it (exact on polytopes)."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if y.shape[0] != body.m:
        raise ValueError("query dimension does not match body")
    if body.m == 1:
        lo = body.verts[0, 0]
        hi = body.verts[-1, 0]
        p = min(max(y[0], lo), hi)
        return np.array([p]), abs(y[0] - p)
    if body.m == 2:
        d, p = _kernels.poly_point_dist(body.verts, y)
        return p, d
    return _project_3d(y, body)


def _closest_on_triangle(p, a, b, c):
    # Ericson, Real-Time Collision Detection, 5.1.5
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = ab @ ap
    d2 = ac @ ap
    if d1 <= 0.0 and d2 <= 0.0:
        return a
    bp = p - b
    d3 = ab @ bp
    d4 = ac @ bp
    if d3 >= 0.0 and d4 <= d3:
        return b
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return a + v * ab
    cp = p - c
    d5 = ab @ cp
    d6 = ac @ cp
    if d6 >= 0.0 and d5 <= d6:
        return c
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return a + w * ac
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return b + w * (c - b)
    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return a + ab * v + ac * w


def _project_3d(y, body: ConvexBody):
    verts = body.verts
    if verts.shape[0] == 1:
        return verts[0].copy(), float(np.linalg.norm(y - verts[0]))
    center, basis, rank = _affine_frame(verts)
    if rank < 3:
        # split off the orthogonal component, project inside the affine hull
        rel = y - center
        coord = basis.T @ rel if rank > 0 else np.zeros(0)
        perp = rel - (basis @ coord if rank > 0 else 0.0)
        if rank == 0:
            return center.copy(), float(np.linalg.norm(y - center))
        flat = ConvexBody.from_points((verts - center) @ basis)
        pin, din = project(coord, flat)
        point = center + basis @ pin
        return point, float(np.hypot(din, np.linalg.norm(perp)))
    from scipy.spatial import ConvexHull

    hull = ConvexHull(verts)
    inside = bool(np.all(hull.equations @ np.append(y, 1.0) <= 1e-10))
    if inside:
        return y.copy(), 0.0
    best = np.inf
    bp = verts[0]
    for simplex in hull.simplices:
        q = _closest_on_triangle(y, verts[simplex[0]], verts[simplex[1]],
                                 verts[simplex[2]])
        d = float(np.linalg.norm(y - q))
        if d < best:
            best = d
            bp = q
    return bp, best


def directed_hausdorff(a: ConvexBody, b: ConvexBody) -> float:
    """sup_{x in A} d(x, B); exact because x -> d(x, B) is convex."""
    return max(project(v, b)[1] for v in a.verts)


def hausdorff(a: ConvexBody, b: ConvexBody) -> float:
    if a.m != b.m:
        raise ValueError("dimension mismatch")
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


# ============================================================
# cap operator K cap B(y, 2 d(y, K))
# ============================================================

def edge_halfplanes(verts: np.ndarray):
    """Unit outward normals and offsets whose intersection is the polygon.

    Degenerate inputs get explicit pinning half-planes (4 for a segment or a
    point) so clipping against them reproduces the degenerate set.
    """
    n = verts.shape[0]
    if n == 1:
        v = verts[0]
        normals = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        offsets = normals @ v
        return normals, offsets
    if n == 2:
        a, b = verts[0], verts[1]
        u = b - a
        u = u / np.linalg.norm(u)
        perp = np.array([-u[1], u[0]])
        normals = np.array([perp, -perp, u, -u])
        offsets = np.array([perp @ a, -perp @ a, u @ b, -u @ a])
        return normals, offsets
    nxt = np.roll(verts, -1, axis=0)
    e = nxt - verts
    lens = np.linalg.norm(e, axis=1)
    normals = np.column_stack([e[:, 1], -e[:, 0]]) / lens[:, None]
    offsets = np.einsum("ij,ij->i", normals, verts)
    return normals, offsets


def ball_intersect_P(y, body: ConvexBody, n_ball: int = 128) -> ConvexBody:
    """The cap K cap B(y, 2 d(y, K)) as a polytope.

    The ball enters as an inscribed polygon with ``n_ball`` boundary nodes
    (m = 2; sampled analogue for m = 3), so the result is an inner polytope
    approximation that always contains the projection of y and is contained
    in K.  d(y, K) <= 1e-12 returns the singleton projection.
    """
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    proj, d = project(y, body)
    if d <= GEOM_EPS:
        return ConvexBody.from_points([proj])
    r = 2.0 * d
    if body.m == 1:
        lo = max(body.verts[0, 0], y[0] - r)
        hi = min(body.verts[-1, 0], y[0] + r)
        return ConvexBody.from_points([[lo], [hi]])
    if body.m == 2:
        normals, offsets = edge_halfplanes(body.verts)
        ang = 2.0 * np.pi * np.arange(n_ball) / n_ball
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
        pts = _kernels.clip_ball_by_edges(normals, offsets, y, r, dirs)
        if pts.shape[0] == 0:
            return ConvexBody.from_points([proj])
        return ConvexBody.from_points(np.vstack([pts, proj[None, :]]))
    return _ball_intersect_3d(y, body, proj, r, n_ball)


def _ball_intersect_3d(y, body, proj, r, n_ball):
    pts = [proj]
    inside_mask = np.linalg.norm(body.verts - y, axis=1) <= r + GEOM_EPS
    pts.extend(body.verts[inside_mask])
    quad = sphere_quadrature(max(n_ball, 60))
    sphere_pts = y + r * quad.nodes
    for q in sphere_pts:
        if project(q, body)[1] <= 1e-9:
            pts.append(q)
    # crossings of hull edges with the sphere
    if body.nverts >= 3:
        center, basis, rank = _affine_frame(body.verts)
        edges = set()
        if rank == 3:
            from scipy.spatial import ConvexHull

            hull = ConvexHull(body.verts)
            for s in hull.simplices:
                for i in range(3):
                    edges.add(tuple(sorted((int(s[i]), int(s[(i + 1) % 3])))))
        else:
            k = body.nverts
            edges = {(i, (i + 1) % k) for i in range(k)}
        for i, j in edges:
            a = body.verts[i]
            b = body.verts[j]
            u = b - a
            aa = u @ u
            if aa == 0.0:
                continue
            bb = 2.0 * (u @ (a - y))
            cc = (a - y) @ (a - y) - r * r
            disc = bb * bb - 4 * aa * cc
            if disc < 0.0:
                continue
            sq = np.sqrt(disc)
            for t in ((-bb - sq) / (2 * aa), (-bb + sq) / (2 * aa)):
                if 0.0 <= t <= 1.0:
                    pts.append(a + t * u)
    return ConvexBody.from_points(np.array(pts))


# ============================================================
# CSV io
# ============================================================

def save_body_csv(body: ConvexBody, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k+1}" for k in range(body.m)])
        for v in body.verts:
            writer.writerow([repr(float(c)) for c in v])


def load_body_csv(path) -> ConvexBody:
    rows = _read_numeric_rows(path)
    return ConvexBody.from_points(np.array(rows))


def save_quadrature_csv(quad: SphereQuadrature, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k+1}" for k in range(quad.m)])
        for v in quad.nodes:
            writer.writerow([repr(float(c)) for c in v])


def load_quadrature_csv(path) -> SphereQuadrature:
    """Nodes from a body-format CSV; weights are uniform (documented)."""
    rows = _read_numeric_rows(path)
    nodes = np.array(rows)
    n = nodes.shape[0]
    return SphereQuadrature(nodes.shape[1], nodes, np.full(n, 1.0 / n))


def _read_numeric_rows(path):
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                continue  # header
    if not rows:
        raise ValueError(f"no numeric rows in {path}")
    return rows
