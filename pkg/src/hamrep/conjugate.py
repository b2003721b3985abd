"""Grid-based Legendre-Fenchel transforms and discrete inf-convolution.

Values are float64 with +inf marking points outside the effective domain;
-inf is rejected at construction and infinities are never subtracted (the
kernels mask them).  The grid conjugate
    g*(p) = max_v <p, v> - g(v)
maximizes over grid nodes only, so it underestimates the continuum conjugate
one-sidedly and is monotone under grid refinement.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels

INF = np.inf


class PropernessError(ValueError):
    """Raised when a value array has no finite entry."""


def _validate_values(values):
    values = np.asarray(values, dtype=np.float64)
    if np.any(np.isneginf(values)) or np.any(np.isnan(values)):
        raise ValueError("values must be finite or +inf")
    if not np.any(np.isfinite(values)):
        raise PropernessError("at least one finite value required")
    return values


@dataclass(frozen=True)
class GridFunction:
    """Extended-real values on a uniform 1-D grid (or 2-D tensor grid)."""

    lo: tuple
    h: tuple
    values: np.ndarray

    @staticmethod
    def from_values(lo, h, values) -> "GridFunction":
        values = _validate_values(values)
        if values.ndim == 1:
            lo = (float(lo),) if np.isscalar(lo) else tuple(float(x) for x in np.atleast_1d(lo))
            h = (float(h),) if np.isscalar(h) else tuple(float(x) for x in np.atleast_1d(h))
        else:
            lo = tuple(float(x) for x in lo)
            h = tuple(float(x) for x in h)
        if len(lo) != values.ndim or len(h) != values.ndim:
            raise ValueError("grid origin/spacing rank mismatch")
        if any(s <= 0 for s in h):
            raise ValueError("grid spacing must be positive")
        v = values.copy()
        v.setflags(write=False)
        return GridFunction(lo, h, v)

    @staticmethod
    def sample(fn, lo, hi, n) -> "GridFunction":
        xs = np.linspace(lo, hi, n)
        vals = np.array([float(fn(x)) for x in xs])
        return GridFunction.from_values(lo, xs[1] - xs[0], vals)

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def nodes(self, axis: int = 0) -> np.ndarray:
        return self.lo[axis] + self.h[axis] * np.arange(self.values.shape[axis])

    def __call__(self, *x) -> float:
        idx = []
        for k, xv in enumerate(x):
            u = (float(xv) - self.lo[k]) / self.h[k]
            i = int(round(u))
            if abs(u - i) > 1e-9 or not (0 <= i < self.values.shape[k]):
                raise KeyError(f"{xv} is not a grid node")
            idx.append(i)
        return float(self.values[tuple(idx)])


def indicator_zero(h: float) -> GridFunction:
    """The one-node indicator of {0} (0 at the origin) on spacing h."""
    return GridFunction.from_values(0.0, h, np.array([0.0]))


def slope_range(g: GridFunction, pad: float = 0.2):
    """Finite-difference slope range of a 1-D grid function, padded.

    Used as the default dual window when nothing better is known.
    """
    if g.ndim != 1:
        raise ValueError("1-D only")
    vals = g.values
    finite = np.isfinite(vals)
    idx = np.flatnonzero(finite)
    if idx.size < 2:
        m = 1.0
        return -m, m
    dv = np.diff(vals[idx])
    dx = np.diff(g.nodes()[idx])
    slopes = dv / dx
    lo = float(np.min(slopes))
    hi = float(np.max(slopes))
    width = max(hi - lo, 1.0)
    return lo - pad * width, hi + pad * width


def dual_window_for_velocities(c_val: float, x, pad: float = 0.2):
    """Velocity window from the growth bound: |v| <= c(t)(1+|x|), padded."""
    r = float(c_val) * (1.0 + float(np.linalg.norm(np.atleast_1d(x))))
    return -(1.0 + pad) * r, (1.0 + pad) * r


def conjugate_grid(g: GridFunction, dual_lo: float, dual_hi: float,
                   dual_n: int) -> GridFunction:
    """Discrete conjugate max over grid nodes on a uniform dual grid.

    One-sided: never exceeds the continuum conjugate of the underlying
    function; refining the primal grid (keeping old nodes) can only raise
    node values.
    """
    if dual_n < 2:
        raise ValueError("need at least 2 dual nodes")
    ps = np.linspace(dual_lo, dual_hi, dual_n)
    if g.ndim == 1:
        out = _kernels.conjugate_max(g.nodes(), g.values, ps)
        return GridFunction.from_values(dual_lo, ps[1] - ps[0], out)
    raise ValueError("use conjugate_grid_2d for tensor grids")


def conjugate_grid_2d(g: GridFunction, lo, hi, n) -> GridFunction:
    """Tensor-grid conjugate by direct chunked maximization (desk scale)."""
    if g.ndim != 2:
        raise ValueError("2-D input required")
    v1 = g.nodes(0)
    v2 = g.nodes(1)
    vv1, vv2 = np.meshgrid(v1, v2, indexing="ij")
    flat_v = np.column_stack([vv1.ravel(), vv2.ravel()])
    flat_g = g.values.ravel()
    finite = np.isfinite(flat_g)
    if not np.any(finite):
        raise PropernessError("no finite values")
    flat_v = flat_v[finite]
    flat_g = flat_g[finite]
    p1 = np.linspace(lo[0], hi[0], n[0])
    p2 = np.linspace(lo[1], hi[1], n[1])
    out = np.empty((n[0], n[1]))
    for i, a in enumerate(p1):
        blk = a * flat_v[:, 0][None, :] + p2[:, None] * flat_v[:, 1][None, :] - flat_g[None, :]
        out[i] = blk.max(axis=1)
    return GridFunction.from_values((p1[0], p2[0]), (p1[1] - p1[0], p2[1] - p2[0]), out)


def episum(phi: GridFunction, psi: GridFunction) -> GridFunction:
    """Discrete inf-convolution (phi # psi)(w) = min_u phi(u) + psi(w - u).

    Requires equal spacing and origin-commensurate grids so every sum of
    nodes is again a node; the output covers the Minkowski window.  The
    one-node indicator of {0} is the exact neutral element.
    """
    if phi.ndim != 1 or psi.ndim != 1:
        raise ValueError("1-D only")
    h1, h2 = phi.h[0], psi.h[0]
    # a single-node operand has no spacing constraint of its own
    if phi.values.shape[0] > 1 and psi.values.shape[0] > 1:
        if abs(h1 - h2) > 1e-12 * max(h1, h2):
            raise ValueError("incompatible grid spacings")
    h = h1 if phi.values.shape[0] > 1 else h2
    vals = _kernels.episum(phi.values, psi.values)
    return GridFunction.from_values(phi.lo[0] + psi.lo[0], h, vals)


@dataclass(frozen=True)
class ConeTermConjugate:
    """Conjugate of p -> k*(1+|p|)*delta: a plateau at -k*delta on the ball
    |v| <= k*delta, +inf outside (the indicator of {0} when k*delta = 0)."""

    level: float
    radius: float

    def __call__(self, v) -> float:
        r = float(np.linalg.norm(np.atleast_1d(v)))
        if r <= self.radius + 1e-15:
            return self.level
        return INF

    def as_grid(self, lo: float, hi: float, n: int) -> GridFunction:
        vs = np.linspace(lo, hi, n)
        vals = np.where(np.abs(vs) <= self.radius + 1e-15, self.level, INF)
        return GridFunction.from_values(lo, vs[1] - vs[0], vals)


def conjugate_of_cone_term(k: float, delta: float) -> ConeTermConjugate:
    if k < 0 or delta < 0:
        raise ValueError("cone term needs k >= 0, delta >= 0")
    kd = float(k) * float(delta)
    return ConeTermConjugate(level=-kd, radius=kd)


def lower_convex_envelope(g: GridFunction) -> GridFunction:
    """Greatest convex minorant of the grid points, evaluated at the nodes.

    Monotone-chain lower hull of the finite points; nodes outside the finite
    support stay +inf.
    """
    if g.ndim != 1:
        raise ValueError("1-D only")
    xs = g.nodes()
    vals = g.values
    fin = np.flatnonzero(np.isfinite(vals))
    pts = [(xs[i], vals[i]) for i in fin]
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) <= 0.0:
                hull.pop()
            else:
                break
        hull.append(p)
    hx = np.array([p[0] for p in hull])
    hy = np.array([p[1] for p in hull])
    out = np.full_like(vals, INF)
    lo_x, hi_x = xs[fin[0]], xs[fin[-1]]
    for i, x in enumerate(xs):
        if x < lo_x - 1e-12 or x > hi_x + 1e-12:
            continue
        out[i] = float(np.interp(x, hx, hy))
    return GridFunction.from_values(g.lo[0], g.h[0], out)


@dataclass(frozen=True)
class BiconjugateReport:
    deviation: float
    conjugate: GridFunction
    biconjugate: GridFunction
    envelope: GridFunction


def biconjugate_check(g: GridFunction, dual_n: int | None = None) -> BiconjugateReport:
    """Compare g** (two grid conjugates) with the lower convex envelope.

    Returns the max node deviation over the envelope's finite support; for
    convex inputs this is bounded by 2h times the slope bound.
    """
    if g.ndim != 1:
        raise ValueError("1-D only")
    n = g.values.shape[0]
    if dual_n is None:
        dual_n = max(512, 2 * n)
    dlo, dhi = slope_range(g)
    gstar = conjugate_grid(g, dlo, dhi, dual_n)
    xs = g.nodes()
    back = _kernels.conjugate_max(gstar.nodes(), gstar.values, xs)
    gss = GridFunction.from_values(g.lo[0], g.h[0], back)
    env = lower_convex_envelope(g)
    mask = np.isfinite(env.values)
    dev = float(np.max(np.abs(gss.values[mask] - env.values[mask])))
    return BiconjugateReport(dev, gstar, gss, env)


# ============================================================
# CSV io: rows "v,value" with the literal inf for +infinity
# ============================================================

def save_grid_csv(g: GridFunction, path):
    if g.ndim != 1:
        raise ValueError("1-D only")
    xs = g.nodes()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["v", "value"])
        for x, val in zip(xs, g.values):
            writer.writerow([repr(float(x)), "inf" if np.isinf(val) else repr(float(val))])


def load_grid_csv(path) -> GridFunction:
    xs = []
    vals = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                x = float(row[0])
            except ValueError:
                continue  # header
            xs.append(x)
            vals.append(INF if row[1].strip() == "inf" else float(row[1]))
    xs = np.array(xs)
    if xs.size < 1:
        raise ValueError(f"no rows in {path}")
    if xs.size == 1:
        return GridFunction.from_values(xs[0], 1.0, np.array(vals))
    hs = np.diff(xs)
    if np.any(np.abs(hs - hs[0]) > 1e-9 * max(1.0, abs(hs[0]))):
        raise ValueError("grid not uniform")
    return GridFunction.from_values(xs[0], hs[0], np.array(vals))
