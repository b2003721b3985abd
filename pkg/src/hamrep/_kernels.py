"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The active backend is chosen at import time: numba when importable and not
disabled via ``HAMREP_DISABLE_NUMBA=1``.  Both paths implement the same
algorithms; parity is covered by tests and ``benchmarks/bench_kernels.py``
compares timings.

Conventions:
  - polygons are (k, 2) float arrays, CCW, extreme vertices only;
  - +inf marks infinite values, -inf is never produced;
  - all reductions are sequential and deterministic.
"""

import os

import numpy as np

_DISABLE = os.environ.get("HAMREP_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

if not _DISABLE:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - numba is an install dependency
        HAS_NUMBA = False
else:
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"

INF = np.inf


def backend_name():
    return BACKEND


# ============================================================
# scalar-loop implementations (njit-compiled when numba is on)
# ============================================================

def _poly_point_dist_k(xs, ys, qx, qy):
    # distance from (qx,qy) to conv{(xs,ys)}; returns (dist, px, py).
    # Handles k = 1 (point) and k = 2 (segment) as well.
    n = xs.shape[0]
    if n == 1:
        dx = qx - xs[0]
        dy = qy - ys[0]
        return np.sqrt(dx * dx + dy * dy), xs[0], ys[0]
    best = INF
    bx = 0.0
    by = 0.0
    inside = n >= 3
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        ex = xs[j] - xs[i]
        ey = ys[j] - ys[i]
        wx = qx - xs[i]
        wy = qy - ys[i]
        if ex * wy - ey * wx < 0.0:
            inside = False
        ll = ex * ex + ey * ey
        if ll > 0.0:
            t = (wx * ex + wy * ey) / ll
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        else:
            t = 0.0
        px = xs[i] + t * ex
        py = ys[i] + t * ey
        d2 = (qx - px) * (qx - px) + (qy - py) * (qy - py)
        if d2 < best:
            best = d2
            bx = px
            by = py
    if inside:
        return 0.0, qx, qy
    return np.sqrt(best), bx, by


def _clip_halfplane_k(xs, ys, n, nx, ny, b, oxs, oys):
    # Sutherland-Hodgman pass: keep nx*x + ny*y <= b.  Returns new count.
    m = 0
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        si = nx * xs[i] + ny * ys[i] - b
        sj = nx * xs[j] + ny * ys[j] - b
        if si <= 0.0:
            oxs[m] = xs[i]
            oys[m] = ys[i]
            m += 1
            if sj > 0.0:
                t = si / (si - sj)
                oxs[m] = xs[i] + t * (xs[j] - xs[i])
                oys[m] = ys[i] + t * (ys[j] - ys[i])
                m += 1
        elif sj <= 0.0:
            t = si / (si - sj)
            oxs[m] = xs[i] + t * (xs[j] - xs[i])
            oys[m] = ys[i] + t * (ys[j] - ys[i])
            m += 1
    return m


def _clip_ball_by_edges_k(enx, eny, eb, cx, cy, r, bcos, bsin, oxs, oys, txs, tys):
    # intersect the inscribed ball polygon at (cx,cy) radius r with the convex
    # region {x : <n_i, x> <= b_i} (unit normals); edges whose half-plane
    # contains the whole ball are skipped.  Returns vertex count (0 = empty).
    nb = bcos.shape[0]
    for j in range(nb):
        oxs[j] = cx + r * bcos[j]
        oys[j] = cy + r * bsin[j]
    m = nb
    ne = enx.shape[0]
    for i in range(ne):
        s = enx[i] * cx + eny[i] * cy - eb[i]
        if s + r <= 0.0:
            continue
        m2 = _clip_halfplane_k(oxs, oys, m, enx[i], eny[i], eb[i], txs, tys)
        for j in range(m2):
            oxs[j] = txs[j]
            oys[j] = tys[j]
        m = m2
        if m == 0:
            return 0
    return m


def _steiner_quad_k(xs, ys, n, qcos, qsin):
    # s_2(K) = 2 * mean_j p_j sigma(K, p_j) on a uniform circle grid, via a
    # rotating argmax sweep (angles ascending).  Re-centering at the vertex
    # mean is exact for uniform grids and improves conditioning.
    nq = qcos.shape[0]
    if n == 1:
        return xs[0], ys[0]
    mx = 0.0
    my = 0.0
    for i in range(n):
        mx += xs[i]
        my += ys[i]
    mx /= n
    my /= n
    k = 0
    best = -INF
    for i in range(n):
        v = qcos[0] * (xs[i] - mx) + qsin[0] * (ys[i] - my)
        if v > best:
            best = v
            k = i
    sx = 0.0
    sy = 0.0
    for j in range(nq):
        px = qcos[j]
        py = qsin[j]
        cur = px * (xs[k] - mx) + py * (ys[k] - my)
        steps = 0
        # advance through exact ties too, or degenerate (duplicate-vertex)
        # polygons from clipping pin the walk on the wrong side
        while steps < n:
            k2 = k + 1
            if k2 == n:
                k2 = 0
            v2 = px * (xs[k2] - mx) + py * (ys[k2] - my)
            if v2 >= cur:
                k = k2
                cur = v2
                steps += 1
            else:
                break
        sx += px * cur
        sy += py * cur
    w = 2.0 / nq
    return sx * w + mx, sy * w + my


def _segment_cap_mid_k(ax, ay, bx, by, cx, cy, r, bcos, bsin):
    # midpoint of segment [A,B] intersect the inscribed ball polygon at
    # (cx,cy) radius r.  Degenerate bodies (<= 2 vertices) must not go
    # through polygon clipping: a zero-width slab clip leaves the surviving
    # chord at the mercy of crossing-interpolation roundoff.  Clipping the
    # 1D segment parameter by each polygon edge is stable, and matches the
    # polygon path (same inscribed ball) so the cap method agrees across
    # neighboring sections.  Steiner point of a segment = its midpoint.
    dx = bx - ax
    dy = by - ay
    if dx * dx + dy * dy == 0.0:
        return ax, ay
    wx = ax - cx
    wy = ay - cy
    nb = bcos.shape[0]
    lo = 0.0
    hi = 1.0
    for k in range(nb):
        k2 = k + 1
        if k2 == nb:
            k2 = 0
        ux = bcos[k] + bcos[k2]
        uy = bsin[k] + bsin[k2]
        nn = (ux * ux + uy * uy) ** 0.5
        if nn == 0.0:
            continue
        # edge halfplane (z-c).(u/nn) <= r cos(pi/nb), with cos(pi/nb) = nn/2
        rhs = 0.5 * r * nn * nn - (wx * ux + wy * uy)
        den = dx * ux + dy * uy
        if den > 1e-300:
            s = rhs / den
            if s < hi:
                hi = s
        elif den < -1e-300:
            s = rhs / den
            if s > lo:
                lo = s
    if lo > hi:
        # r = 2 d(c, segment) keeps the projection strictly feasible, so
        # an empty interval is pure roundoff; use the projection parameter
        mid = (dx * (cx - ax) + dy * (cy - ay)) / (dx * dx + dy * dy)
        if mid < 0.0:
            mid = 0.0
        elif mid > 1.0:
            mid = 1.0
    else:
        mid = 0.5 * (lo + hi)
    return ax + mid * dx, ay + mid * dy


def _construct_batch_k(pxs, pys, enx, eny, eb, omega, a1, a2, qcos, qsin,
                       bcos, bsin, sing_tol, bsx, bsy, out):
    # For each control a = (a1, a2) in the unit ball: center c = omega * a,
    # d = dist(c, body); singleton rule (d <= sing_tol: e = c exactly) or
    # e = Steiner(body intersect Ball(c, 2d)).  A ball that swallows the
    # whole body short-circuits to the precomputed body Steiner (bsx, bsy).
    # out columns: e_v, e_eta, d, cap vertex count (1 = singleton path).
    nb = bcos.shape[0]
    ne = enx.shape[0]
    nv = pxs.shape[0]
    oxs = np.empty(nb + ne + 8)
    oys = np.empty(nb + ne + 8)
    txs = np.empty(nb + ne + 8)
    tys = np.empty(nb + ne + 8)
    for t in range(a1.shape[0]):
        cx = omega * a1[t]
        cy = omega * a2[t]
        d, prx, pry = _poly_point_dist_k(pxs, pys, cx, cy)
        if d <= sing_tol:
            out[t, 0] = cx
            out[t, 1] = cy
            out[t, 2] = d
            out[t, 3] = 1.0
            continue
        r = 2.0 * d
        far2 = 0.0
        for i in range(nv):
            v2 = (pxs[i] - cx) * (pxs[i] - cx) + (pys[i] - cy) * (pys[i] - cy)
            if v2 > far2:
                far2 = v2
        if far2 <= r * r:
            out[t, 0] = bsx
            out[t, 1] = bsy
            out[t, 2] = d
            out[t, 3] = nv
            continue
        if nv <= 2:
            ex, ey = _segment_cap_mid_k(pxs[0], pys[0], pxs[nv - 1],
                                        pys[nv - 1], cx, cy, r, bcos, bsin)
            out[t, 0] = ex
            out[t, 1] = ey
            out[t, 2] = d
            out[t, 3] = 2.0
            continue
        m = _clip_ball_by_edges_k(enx, eny, eb, cx, cy, r, bcos, bsin,
                                  oxs, oys, txs, tys)
        if m == 0:
            # inscribed-polygon shaving lost the cap; fall back to projection
            out[t, 0] = prx
            out[t, 1] = pry
            out[t, 2] = d
            out[t, 3] = 1.0
            continue
        ex, ey = _steiner_quad_k(oxs, oys, m, qcos, qsin)
        out[t, 0] = ex
        out[t, 1] = ey
        out[t, 2] = d
        out[t, 3] = m
    return out


def _conjugate_max_k(vs, gs, ps, out):
    # out[i] = max_j ps[i]*vs[j] - gs[j] over finite gs.
    nv = vs.shape[0]
    for i in range(ps.shape[0]):
        p = ps[i]
        best = -INF
        for j in range(nv):
            g = gs[j]
            if g == INF:
                continue
            val = p * vs[j] - g
            if val > best:
                best = val
        out[i] = best
    return out


def _episum_k(phi, psi, out):
    # out[k] = min_{i+j=k} phi[i] + psi[j] on aligned uniform grids.
    n1 = phi.shape[0]
    n2 = psi.shape[0]
    for k in range(n1 + n2 - 1):
        best = INF
        lo = k - (n2 - 1)
        if lo < 0:
            lo = 0
        hi = k
        if hi > n1 - 1:
            hi = n1 - 1
        for i in range(lo, hi + 1):
            a = phi[i]
            if a == INF:
                continue
            b = psi[k - i]
            if b == INF:
                continue
            s = a + b
            if s < best:
                best = s
        out[k] = best
    return out


def _interp1_inf_k(x0, h, vals, x):
    # linear interpolation on a uniform grid; any touched +inf node
    # propagates; outside the grid -> +inf.  Exact node hits pass through.
    n = vals.shape[0]
    u = (x - x0) / h
    if u < -1e-12 or u > n - 1 + 1e-12:
        return INF
    i = int(np.floor(u))
    if i < 0:
        i = 0
    if i > n - 2:
        i = n - 2
    t = u - i
    a = vals[i]
    b = vals[i + 1]
    if t <= 1e-12:
        return a
    if t >= 1.0 - 1e-12:
        return b
    if a == INF or b == INF:
        return INF
    return a + t * (b - a)


def _dp_step_k(xs, moves, costs, vnext, ht, out_v, out_arg):
    # one explicit-Euler backward step:
    # out_v[j] = min_k ht*costs[j,k] + Vnext(xs[j] + ht*moves[j,k])
    x0 = xs[0]
    h = xs[1] - xs[0]
    for j in range(xs.shape[0]):
        best = INF
        barg = -1
        for k in range(moves.shape[1]):
            c = costs[j, k]
            if c == INF:
                continue
            vn = _interp1_inf_k(x0, h, vnext, xs[j] + ht * moves[j, k])
            if vn == INF:
                continue
            val = ht * c + vn
            if val < best:
                best = val
                barg = k
        out_v[j] = best
        out_arg[j] = barg
    return out_v


# plain-python alias kept for the numpy fallback path below
_segment_cap_mid = _segment_cap_mid_k

if HAS_NUMBA:
    # Rebind in dependency order so jitted bodies resolve jitted globals.
    _poly_point_dist_k = njit(cache=True)(_poly_point_dist_k)
    _clip_halfplane_k = njit(cache=True)(_clip_halfplane_k)
    _clip_ball_by_edges_k = njit(cache=True)(_clip_ball_by_edges_k)
    _steiner_quad_k = njit(cache=True)(_steiner_quad_k)
    _segment_cap_mid_k = njit(cache=True)(_segment_cap_mid_k)
    _construct_batch_k = njit(cache=True)(_construct_batch_k)
    _conjugate_max_k = njit(cache=True)(_conjugate_max_k)
    _episum_k = njit(cache=True)(_episum_k)
    _interp1_inf_k = njit(cache=True)(_interp1_inf_k)
    _dp_step_k = njit(cache=True)(_dp_step_k)


# ============================================================
# vectorized numpy fallbacks for the batch-hot entry points
# ============================================================

def _poly_point_dist_np(xs, ys, qx, qy):
    n = xs.shape[0]
    if n == 1:
        return float(np.hypot(qx - xs[0], qy - ys[0])), xs[0], ys[0]
    ex = np.roll(xs, -1) - xs
    ey = np.roll(ys, -1) - ys
    wx = qx - xs
    wy = qy - ys
    if n >= 3 and bool(np.all(ex * wy - ey * wx >= 0.0)):
        return 0.0, qx, qy
    ll = ex * ex + ey * ey
    t = np.where(ll > 0.0, (wx * ex + wy * ey) / np.where(ll > 0.0, ll, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    px = xs + t * ex
    py = ys + t * ey
    d2 = (qx - px) ** 2 + (qy - py) ** 2
    i = int(np.argmin(d2))
    return float(np.sqrt(d2[i])), px[i], py[i]


def _clip_ball_by_edges_np(enx, eny, eb, cx, cy, r, bcos, bsin):
    vx = cx + r * bcos
    vy = cy + r * bsin
    for i in range(enx.shape[0]):
        s0 = enx[i] * cx + eny[i] * cy - eb[i]
        if s0 + r <= 0.0:
            continue
        s = enx[i] * vx + eny[i] * vy - eb[i]
        if vx.shape[0] == 0:
            return vx, vy
        sr = np.roll(s, -1)
        vxr = np.roll(vx, -1)
        vyr = np.roll(vy, -1)
        keep = s <= 0.0
        crossing = (keep & (sr > 0.0)) | (~keep & (sr <= 0.0))
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(crossing, s / np.where(s != sr, s - sr, 1.0), 0.0)
        cutx = vx + t * (vxr - vx)
        cuty = vy + t * (vyr - vy)
        nvx = []
        nvy = []
        for j in range(vx.shape[0]):
            if keep[j]:
                nvx.append(vx[j])
                nvy.append(vy[j])
            if crossing[j]:
                nvx.append(cutx[j])
                nvy.append(cuty[j])
        vx = np.array(nvx)
        vy = np.array(nvy)
        if vx.shape[0] == 0:
            return vx, vy
    return vx, vy


def _steiner_quad_np(xs, ys, qcos, qsin):
    if xs.shape[0] == 1:
        return xs[0], ys[0]
    mx = xs.mean()
    my = ys.mean()
    sup = np.max(qcos[:, None] * (xs - mx)[None, :] +
                 qsin[:, None] * (ys - my)[None, :], axis=1)
    nq = qcos.shape[0]
    return 2.0 * np.dot(qcos, sup) / nq + mx, 2.0 * np.dot(qsin, sup) / nq + my


def _construct_batch_np(pxs, pys, enx, eny, eb, omega, a1, a2, qcos, qsin,
                        bcos, bsin, sing_tol, bsx, bsy, out):
    for t in range(a1.shape[0]):
        cx = omega * a1[t]
        cy = omega * a2[t]
        d, prx, pry = _poly_point_dist_np(pxs, pys, cx, cy)
        if d <= sing_tol:
            out[t, 0] = cx
            out[t, 1] = cy
            out[t, 2] = d
            out[t, 3] = 1.0
            continue
        far2 = float(np.max((pxs - cx) ** 2 + (pys - cy) ** 2))
        if far2 <= 4.0 * d * d:
            out[t, 0] = bsx
            out[t, 1] = bsy
            out[t, 2] = d
            out[t, 3] = pxs.shape[0]
            continue
        nv = pxs.shape[0]
        if nv <= 2:
            ex, ey = _segment_cap_mid(pxs[0], pys[0], pxs[nv - 1], pys[nv - 1],
                                      cx, cy, 2.0 * d, bcos, bsin)
            out[t, 0] = ex
            out[t, 1] = ey
            out[t, 2] = d
            out[t, 3] = 2.0
            continue
        vx, vy = _clip_ball_by_edges_np(enx, eny, eb, cx, cy, 2.0 * d, bcos, bsin)
        if vx.shape[0] == 0:
            out[t, 0] = prx
            out[t, 1] = pry
            out[t, 2] = d
            out[t, 3] = 1.0
            continue
        ex, ey = _steiner_quad_np(vx, vy, qcos, qsin)
        out[t, 0] = ex
        out[t, 1] = ey
        out[t, 2] = d
        out[t, 3] = vx.shape[0]
    return out


def _conjugate_max_np(vs, gs, ps, out):
    finite = np.isfinite(gs)
    vsf = vs[finite]
    gsf = gs[finite]
    step = max(1, int(4e6 // max(1, vsf.shape[0])))
    for s in range(0, ps.shape[0], step):
        blk = ps[s:s + step, None] * vsf[None, :] - gsf[None, :]
        out[s:s + step] = blk.max(axis=1)
    return out


def _episum_np(phi, psi, out):
    n1 = phi.shape[0]
    n2 = psi.shape[0]
    out[:] = INF
    for i in range(n1):
        a = phi[i]
        if a == INF:
            continue
        np.minimum(out[i:i + n2], a + psi, out=out[i:i + n2])
    return out


def _dp_step_np(xs, moves, costs, vnext, ht, out_v, out_arg):
    n = vnext.shape[0]
    x0 = xs[0]
    h = xs[1] - xs[0]
    xn = xs[:, None] + ht * moves
    u = (xn - x0) / h
    bad = (u < -1e-12) | (u > n - 1 + 1e-12)
    i = np.clip(np.floor(u).astype(np.int64), 0, n - 2)
    t = u - i
    a = vnext[i]
    b = vnext[i + 1]
    lo_hit = t <= 1e-12
    hi_hit = t >= 1.0 - 1e-12
    with np.errstate(invalid="ignore"):
        mid = np.where(np.isinf(a) | np.isinf(b), INF, a + t * (b - a))
    vn = np.where(lo_hit, a, np.where(hi_hit, b, mid))
    vn = np.where(bad, INF, vn)
    with np.errstate(invalid="ignore"):
        total = np.where(np.isinf(costs) | np.isinf(vn), INF, ht * costs + vn)
    out_arg[:] = np.argmin(total, axis=1)
    out_v[:] = total[np.arange(xs.shape[0]), out_arg]
    out_arg[np.isinf(out_v)] = -1
    return out_v


# ============================================================
# public wrappers (uniform signatures across backends)
# ============================================================

def poly_point_dist(verts, q):
    """Distance and nearest point from q to a convex CCW polygon (k,2)."""
    xs = np.ascontiguousarray(verts[:, 0], dtype=np.float64)
    ys = np.ascontiguousarray(verts[:, 1], dtype=np.float64)
    fn = _poly_point_dist_k if HAS_NUMBA else _poly_point_dist_np
    d, px, py = fn(xs, ys, float(q[0]), float(q[1]))
    return float(d), np.array([px, py])


def clip_ball_by_edges(edge_normals, edge_offsets, center, radius, ball_dirs):
    """Inscribed ball polygon cut to {<n,x> <= b} half-planes; (k,2) CCW."""
    enx = np.ascontiguousarray(edge_normals[:, 0], dtype=np.float64)
    eny = np.ascontiguousarray(edge_normals[:, 1], dtype=np.float64)
    eb = np.ascontiguousarray(edge_offsets, dtype=np.float64)
    bcos = np.ascontiguousarray(ball_dirs[:, 0], dtype=np.float64)
    bsin = np.ascontiguousarray(ball_dirs[:, 1], dtype=np.float64)
    if HAS_NUMBA:
        nb = bcos.shape[0]
        ne = enx.shape[0]
        oxs = np.empty(nb + ne + 8)
        oys = np.empty(nb + ne + 8)
        txs = np.empty(nb + ne + 8)
        tys = np.empty(nb + ne + 8)
        m = _clip_ball_by_edges_k(enx, eny, eb, float(center[0]), float(center[1]),
                                  float(radius), bcos, bsin, oxs, oys, txs, tys)
        return np.column_stack([oxs[:m], oys[:m]])
    vx, vy = _clip_ball_by_edges_np(enx, eny, eb, float(center[0]),
                                    float(center[1]), float(radius), bcos, bsin)
    return np.column_stack([vx, vy])


def steiner_quad_polygon(verts, qcos, qsin):
    """Quadrature Steiner point of a CCW convex polygon."""
    xs = np.ascontiguousarray(verts[:, 0], dtype=np.float64)
    ys = np.ascontiguousarray(verts[:, 1], dtype=np.float64)
    qcos = np.ascontiguousarray(qcos, dtype=np.float64)
    qsin = np.ascontiguousarray(qsin, dtype=np.float64)
    if HAS_NUMBA:
        sx, sy = _steiner_quad_k(xs, ys, xs.shape[0], qcos, qsin)
    else:
        sx, sy = _steiner_quad_np(xs, ys, qcos, qsin)
    return np.array([sx, sy])


def construct_batch(poly, edge_normals, edge_offsets, omega, controls,
                    qcos, qsin, ball_dirs, sing_tol=1e-12, body_steiner=None):
    """Cap-and-center selection for a batch of unit-ball controls.

    Returns (K,4): columns e_v, e_eta, d, cap vertex count (1 = singleton).
    ``body_steiner`` is the Steiner point of the full body, used whenever a
    cap ball swallows it; computed here if not supplied.
    """
    pxs = np.ascontiguousarray(poly[:, 0], dtype=np.float64)
    pys = np.ascontiguousarray(poly[:, 1], dtype=np.float64)
    enx = np.ascontiguousarray(edge_normals[:, 0], dtype=np.float64)
    eny = np.ascontiguousarray(edge_normals[:, 1], dtype=np.float64)
    eb = np.ascontiguousarray(edge_offsets, dtype=np.float64)
    a1 = np.ascontiguousarray(controls[:, 0], dtype=np.float64)
    a2 = np.ascontiguousarray(controls[:, 1], dtype=np.float64)
    qcos = np.ascontiguousarray(qcos, dtype=np.float64)
    qsin = np.ascontiguousarray(qsin, dtype=np.float64)
    bcos = np.ascontiguousarray(ball_dirs[:, 0], dtype=np.float64)
    bsin = np.ascontiguousarray(ball_dirs[:, 1], dtype=np.float64)
    if body_steiner is None:
        body_steiner = steiner_quad_polygon(poly, qcos, qsin)
    out = np.empty((a1.shape[0], 4))
    fn = _construct_batch_k if HAS_NUMBA else _construct_batch_np
    fn(pxs, pys, enx, eny, eb, float(omega), a1, a2, qcos, qsin,
       bcos, bsin, float(sing_tol), float(body_steiner[0]),
       float(body_steiner[1]), out)
    return out


def conjugate_max(vs, gs, ps):
    """max_j p*v_j - g_j per dual node, skipping +inf entries."""
    vs = np.ascontiguousarray(vs, dtype=np.float64)
    gs = np.ascontiguousarray(gs, dtype=np.float64)
    ps = np.ascontiguousarray(ps, dtype=np.float64)
    out = np.empty(ps.shape[0])
    fn = _conjugate_max_k if HAS_NUMBA else _conjugate_max_np
    return fn(vs, gs, ps, out)


def episum(phi, psi):
    """Discrete inf-convolution of two aligned uniform-grid value arrays."""
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    psi = np.ascontiguousarray(psi, dtype=np.float64)
    out = np.empty(phi.shape[0] + psi.shape[0] - 1)
    fn = _episum_k if HAS_NUMBA else _episum_np
    return fn(phi, psi, out)


def dp_backward_step(xs, moves, costs, vnext, ht):
    """One explicit-Euler backward DP step; returns (values, argmin indices)."""
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    moves = np.ascontiguousarray(moves, dtype=np.float64)
    costs = np.ascontiguousarray(costs, dtype=np.float64)
    vnext = np.ascontiguousarray(vnext, dtype=np.float64)
    out_v = np.empty(xs.shape[0])
    out_arg = np.empty(xs.shape[0], dtype=np.int64)
    fn = _dp_step_k if HAS_NUMBA else _dp_step_np
    fn(xs, moves, costs, vnext, float(ht), out_v, out_arg)
    return out_v, out_arg


def interp1_inf(x0, h, vals, x):
    """Uniform-grid linear interpolation with +inf propagation."""
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    if HAS_NUMBA:
        return float(_interp1_inf_k(float(x0), float(h), vals, float(x)))
    n = vals.shape[0]
    u = (float(x) - float(x0)) / float(h)
    if u < -1e-12 or u > n - 1 + 1e-12:
        return INF
    i = min(max(int(np.floor(u)), 0), n - 2)
    t = u - i
    a = vals[i]
    b = vals[i + 1]
    if t <= 1e-12:
        return float(a)
    if t >= 1.0 - 1e-12:
        return float(b)
    if a == INF or b == INF:
        return INF
    return float(a + t * (b - a))


def warmup():
    """Trigger jit compilation of all kernels on tiny inputs."""
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    nrm = np.array([[0.0, -1.0], [np.sqrt(0.5), np.sqrt(0.5)], [-1.0, 0.0]])
    off = np.array([0.0, np.sqrt(0.5), 0.0])
    ang = np.linspace(0.0, 2 * np.pi, 16, endpoint=False)
    dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    poly_point_dist(tri, np.array([2.0, 2.0]))
    clip_ball_by_edges(nrm, off, np.array([0.2, 0.2]), 0.5, dirs)
    steiner_quad_polygon(tri, dirs[:, 0], dirs[:, 1])
    construct_batch(tri, nrm, off, 1.0, np.array([[0.5, 0.5], [0.0, 0.0]]),
                    dirs[:, 0], dirs[:, 1], dirs)
    conjugate_max(np.array([0.0, 1.0]), np.array([0.0, 1.0]), np.array([0.5]))
    episum(np.array([0.0, 1.0]), np.array([0.0, INF]))
    dp_backward_step(np.linspace(-1, 1, 5), np.zeros((5, 2)), np.zeros((5, 2)),
                     np.zeros(5), 0.1)
    interp1_inf(0.0, 1.0, np.array([0.0, 1.0]), 0.5)
