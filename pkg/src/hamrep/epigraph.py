"""Epigraph sections E(t, x) = {(v, eta) : eta >= L(t, x, v)} and the set
operations the construction relies on.

Sections are handled through velocity grids.  Polytope views are inner
approximations: the convex hull of graph samples (and a flat top at the
truncation level) is contained in the true epigraph whenever L is convex,
so membership and distance statements made through them are one-sided.
Open domains are probed strictly inside, at a relative inset of 2^-40.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry

INF = np.inf

OPEN_DOM_INSET = 2.0 ** -40  # relative inset for open-domain probing
DEFAULT_DISTANCE_GRID = 513
DEFAULT_BODY_GRID = 129


@dataclass(frozen=True)
class EpigraphSection:
    """One (t, x) slice of a Lagrangian epigraph."""

    t: float
    x: float
    L: object  # v -> value, numpy-vectorized, +inf outside the domain
    dom_lo: float
    dom_hi: float
    open_dom: bool = False

    @staticmethod
    def from_entry(entry, t: float, x: float) -> "EpigraphSection":
        Lm = entry.lagrangian
        lo, hi = Lm.dom(t, x)

        def sect(v, _t=t, _x=x, _L=Lm.L):
            return _L(_t, _x, v)

        return EpigraphSection(float(t), float(x), sect, float(lo), float(hi),
                               open_dom=Lm.open_dom)

    @property
    def dom_width(self) -> float:
        return self.dom_hi - self.dom_lo

    def velocity_grid(self, n: int) -> np.ndarray:
        """Uniform domain grid; open domains are inset strictly inside."""
        if self.dom_width <= 0:
            return np.array([self.dom_lo])
        vs = np.linspace(self.dom_lo, self.dom_hi, n)
        if self.open_dom:
            inset = OPEN_DOM_INSET * self.dom_width
            vs = np.clip(vs, self.dom_lo + inset, self.dom_hi - inset)
        return vs

    def graph_points(self, n: int) -> np.ndarray:
        """Finite graph samples (v, L(v)) as an (k, 2) array."""
        vs = self.velocity_grid(n)
        vals = np.asarray(self.L(vs), dtype=np.float64)
        vals = np.atleast_1d(vals)
        fin = np.isfinite(vals)
        return np.column_stack([vs[fin], vals[fin]])

    def member(self, v: float, eta: float, tol: float = 1e-9) -> bool:
        """Is (v, eta) in the section, up to tol in both coordinates?"""
        if not (self.dom_lo - tol <= v <= self.dom_hi + tol):
            return False
        val = float(self.L(float(np.clip(v, self.dom_lo, self.dom_hi))))
        if not np.isfinite(val):
            # try the strict inside for open domains and boundary snaps
            if self.dom_width > 0:
                inset = max(OPEN_DOM_INSET * self.dom_width, 1e-15)
                val = float(self.L(float(np.clip(v, self.dom_lo + inset,
                                                 self.dom_hi - inset))))
            if not np.isfinite(val):
                return False
        return eta >= val - tol

    def distance(self, v: float, eta: float,
                 n_grid: int = DEFAULT_DISTANCE_GRID):
        """Euclidean distance from (v, eta) to the section, with a witness.

        The witness objective u -> (u-v)^2 + max(0, L(u)-eta)^2 is convex
        for convex L; a domain grid scan plus golden refinement nails it.
        """
        if self.member(v, eta):
            return 0.0, (v, eta)
        vs = self.velocity_grid(n_grid)
        vals = np.atleast_1d(np.asarray(self.L(vs), dtype=np.float64))
        fin = np.isfinite(vals)
        if not np.any(fin):
            raise ValueError("empty section")
        vs = vs[fin]
        vals = vals[fin]
        obj = (vs - v) ** 2 + np.maximum(0.0, vals - eta) ** 2
        i = int(np.argmin(obj))
        best, ubest, sbest = obj[i], vs[i], max(vals[i], eta)

        def g(u):
            val = float(self.L(u))
            if not np.isfinite(val):
                return INF, eta
            return (u - v) ** 2 + max(0.0, val - eta) ** 2, max(val, eta)

        glo = vs[max(0, i - 1)]
        ghi = vs[min(vs.size - 1, i + 1)]
        gr = (np.sqrt(5.0) - 1.0) / 2.0
        c = ghi - gr * (ghi - glo)
        d = glo + gr * (ghi - glo)
        fc, sc = g(c)
        fd, sd = g(d)
        for _ in range(60):
            if fc <= fd:
                ghi, d, fd, sd = d, c, fc, sc
                c = ghi - gr * (ghi - glo)
                fc, sc = g(c)
            else:
                glo, c, fc, sc = c, d, fd, sd
                d = glo + gr * (ghi - glo)
                fd, sd = g(d)
        for u, val, s in ((c, fc, sc), (d, fd, sd)):
            if val < best:
                best, ubest, sbest = val, u, s
        return float(np.sqrt(best)), (float(ubest), float(sbest))

    def min_value(self, n_grid: int = DEFAULT_DISTANCE_GRID) -> float:
        vals = np.atleast_1d(np.asarray(self.L(self.velocity_grid(n_grid)),
                                        dtype=np.float64))
        fin = vals[np.isfinite(vals)]
        if fin.size == 0:
            raise ValueError("empty section")
        return float(np.min(fin))

    def to_body(self, eta_cap: float,
                n_grid: int = DEFAULT_BODY_GRID) -> geometry.ConvexBody:
        """Inner polytope of the truncation E(t,x) with eta <= eta_cap.

        Hull of the graph samples at or below the cap plus the flat top
        between the outermost such samples.  Every vertex is a true member.
        """
        pts = self.graph_points(n_grid)
        if pts.shape[0] == 0:
            raise ValueError("empty section")
        keep = pts[:, 1] <= eta_cap
        if not np.any(keep):
            raise ValueError("truncation level below the section minimum")
        kept = pts[keep]
        top = np.array([[kept[0, 0], eta_cap], [kept[-1, 0], eta_cap]])
        return geometry.ConvexBody.from_points(np.vstack([kept, top]))


def section(entry, t: float, x: float) -> EpigraphSection:
    return EpigraphSection.from_entry(entry, t, x)


def truncated_hausdorff(sa: EpigraphSection, sb: EpigraphSection,
                        eta_cap: float, n_grid: int = DEFAULT_BODY_GRID) -> float:
    """Hausdorff distance between two sections truncated at a common level.

    Both sections are truncated at the same eta_cap; comparing bodies built
    with different caps would measure the caps, not the sections.
    """
    body_a = sa.to_body(eta_cap, n_grid)
    body_b = sb.to_body(eta_cap, n_grid)
    return geometry.hausdorff(body_a, body_b)


def hausdorff_rate_check(entry, t: float, xs, k_R: float, eta_cap: float,
                         n_grid: int = DEFAULT_BODY_GRID, slack: float = 0.0):
    """Audit H(E(t,x), E(t,y)) <= 2 k_R |x - y| on truncations.

    Returns (passed, worst_gap, worst_pair).  ``slack`` absorbs the
    discretization of the polytope views.
    """
    xs = np.asarray(xs, dtype=np.float64)
    secs = [EpigraphSection.from_entry(entry, t, x) for x in xs]
    worst = -INF
    worst_pair = (xs[0], xs[0])
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            hd = truncated_hausdorff(secs[i], secs[j], eta_cap, n_grid)
            gap = hd - 2.0 * k_R * abs(xs[i] - xs[j])
            if gap > worst:
                worst = gap
                worst_pair = (float(xs[i]), float(xs[j]))
    return worst <= slack, float(worst), worst_pair
