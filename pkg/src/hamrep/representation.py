"""Compact-control representation of a Hamiltonian from its Lagrangian.

For state dimension one the control set is the closed unit ball in the
(velocity, cost) plane.  Each control a is scaled to the center omega(t,x)*a,
where

    omega(t, x) = |lambda(t, x)| + |H(t, x, 0)| + c(t)(1 + |x|) + 1

and lambda is the locally Lipschitz upper bound of L on its domain (without
one the scaling blows up and no faithful representation exists; callers get
``BLCRequiredError``).  The selected point is

    e(t, x, a) = Steiner(E(t, x) cap Ball(omega a, 2 dist)),

with e = omega a exactly when the center already lies in the epigraph.
Splitting e = (f, l) componentwise gives

    H(t, x, p) = sup_{|a| <= 1} <p, f(t, x, a)> - l(t, x, a),

with f, l jointly Lipschitz in (x, a) at an explicit dimension-only rate.
Every graph sample (v, L(v)) / omega is a control that reproduces (v, L(v))
exactly, which is what makes the supremum attain H.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import csv

import numpy as np
from scipy.stats import qmc

from . import _kernels, geometry
from .epigraph import EpigraphSection

INF = np.inf

DEFAULT_GRAPH_NODES = 129  # section grid behind the epigraph body
DEFAULT_BALL_NODES = 128  # inscribed ball polygon resolution
DEFAULT_QUAD_NODES = 512  # circle quadrature for the Steiner sweep
SINGLETON_TOL = 1e-12


class BLCRequiredError(ValueError):
    """The model declares no locally Lipschitz upper bound on L."""


def omega_value(entry, t: float, x: float) -> float:
    """The control scaling omega(t, x); needs the declared bound."""
    Lm = entry.lagrangian
    if Lm.lam is None:
        raise BLCRequiredError(
            f"model {entry.key!r} has no bounded-above certificate; "
            "the construction scaling is undefined")
    Hm = entry.hamiltonian
    return (abs(float(Lm.lam(t, x))) + abs(float(Hm.H(t, x, 0.0)))
            + float(Hm.c(t)) * (1.0 + abs(x)) + 1.0)


def omega_sup(entry, t: float, R: float) -> float:
    """The radius-R bound |lambda(t,0)| + |H(t,0,0)| + c(t)(2 + R)."""
    Lm = entry.lagrangian
    if Lm.lam is None:
        raise BLCRequiredError(f"model {entry.key!r} has no bounded-above certificate")
    Hm = entry.hamiltonian
    return (abs(float(Lm.lam(t, 0.0))) + abs(float(Hm.H(t, 0.0, 0.0)))
            + float(Hm.c(t)) * (2.0 + R))


def lipschitz_bound(entry, t: float, R: float) -> float:
    """Joint (x, a) Lipschitz rate of the constructed f, l on B_R x ball:
    10 (n+1) (omega_sup + 3 (1+R) k_R + 1)."""
    n = entry.hamiltonian.n
    k = float(entry.hamiltonian.k_R(t, R))
    return 10.0 * (n + 1) * (omega_sup(entry, t, R) + 3.0 * (1.0 + R) * k + 1.0)


# ============================================================
# cached per-(t, x) geometry
# ============================================================

@dataclass(frozen=True)
class SectionGeometry:
    t: float
    x: float
    omega: float
    section: EpigraphSection
    body: geometry.ConvexBody
    normals: np.ndarray
    offsets: np.ndarray
    graph: np.ndarray  # (k, 2) graph samples inside the body
    body_steiner: np.ndarray  # Steiner point of the full truncated body


@dataclass(frozen=True)
class ConstructionTrace:
    t: float
    x: float
    omega: float
    controls: np.ndarray  # (K, 2)
    e: np.ndarray  # (K, 2) selected epigraph points
    dist: np.ndarray  # (K,) center-to-epigraph distances
    cap_verts: np.ndarray  # (K,) cap polytope sizes (1 = center was inside)


class Representation:
    """Constructs and audits the unit-ball representation for one model."""

    def __init__(self, entry, n_graph: int = DEFAULT_GRAPH_NODES,
                 n_ball: int = DEFAULT_BALL_NODES,
                 n_quad: int = DEFAULT_QUAD_NODES):
        if entry.hamiltonian.n != 1:
            raise ValueError("state dimension one only")
        if entry.lagrangian.lam is None:
            raise BLCRequiredError(
                f"model {entry.key!r} has no bounded-above certificate; "
                "supply one with with_bound() if a valid lambda exists")
        self.entry = entry
        self.n_graph = int(n_graph)
        self.n_ball = int(n_ball)
        ang = 2.0 * np.pi * np.arange(n_quad) / n_quad
        self._qcos = np.cos(ang)
        self._qsin = np.sin(ang)
        ang_b = 2.0 * np.pi * np.arange(n_ball) / n_ball
        self._ball_dirs = np.column_stack([np.cos(ang_b), np.sin(ang_b)])
        self._cache: dict = {}

    # -------------------- geometry cache --------------------

    def omega(self, t: float, x: float) -> float:
        return omega_value(self.entry, t, x)

    def section_geometry(self, t: float, x: float) -> SectionGeometry:
        key = (float(t), float(x), self.n_graph)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        om = self.omega(t, x)
        sec = EpigraphSection.from_entry(self.entry, t, x)
        # centers live in B(0, omega); caps stay within eta <= omega + 2*reach
        graph = sec.graph_points(self.n_graph)
        if graph.shape[0] == 0:
            raise ValueError("empty epigraph section")
        reach = om + float(np.max(np.abs(graph))) + 1.0
        eta_cap = om + 2.0 * reach
        body = sec.to_body(eta_cap, self.n_graph)
        normals, offsets = geometry.edge_halfplanes(body.verts)
        steiner = _kernels.steiner_quad_polygon(body.verts, self._qcos, self._qsin)
        geo = SectionGeometry(float(t), float(x), om, sec, body,
                              np.ascontiguousarray(normals),
                              np.ascontiguousarray(offsets), graph, steiner)
        if len(self._cache) > 512:
            self._cache.clear()
        self._cache[key] = geo
        return geo

    # -------------------- construction --------------------

    def construct(self, t: float, x: float, controls) -> ConstructionTrace:
        """Run the cap-and-center selection for a batch of unit-ball controls."""
        controls = np.atleast_2d(np.asarray(controls, dtype=np.float64))
        norms = np.linalg.norm(controls, axis=1)
        if np.any(norms > 1.0 + 1e-9):
            raise ValueError("controls must lie in the closed unit ball")
        geo = self.section_geometry(t, x)
        out = _kernels.construct_batch(geo.body.verts, geo.normals, geo.offsets,
                                       geo.omega, controls, self._qcos,
                                       self._qsin, self._ball_dirs,
                                       sing_tol=SINGLETON_TOL,
                                       body_steiner=geo.body_steiner)
        return ConstructionTrace(float(t), float(x), geo.omega, controls,
                                 out[:, :2].copy(), out[:, 2].copy(),
                                 out[:, 3].copy())

    def e(self, t: float, x: float, a) -> np.ndarray:
        """The selected point for a single control."""
        return self.construct(t, x, [a]).e[0]

    def f_l(self, t: float, x: float, a):
        ev = self.e(t, x, a)
        return float(ev[0]), float(ev[1])

    def graph_controls(self, t: float, x: float) -> np.ndarray:
        """Controls (v, L(v)) / omega; the construction returns them scaled
        back exactly, so the supremum reaches every graph value."""
        geo = self.section_geometry(t, x)
        return geo.graph / geo.omega

    def control_cloud(self, t: float, x: float, n: int = 4096,
                      seed: int = 0) -> np.ndarray:
        """Low-discrepancy unit-ball controls plus the structural ones:
        the graph controls, a boundary ring, and the origin."""
        sob = qmc.Sobol(d=2, scramble=True, seed=seed).random(n)
        r = np.sqrt(sob[:, 0])
        th = 2.0 * np.pi * sob[:, 1]
        disc = np.column_stack([r * np.cos(th), r * np.sin(th)])
        ring_ang = 2.0 * np.pi * np.arange(64) / 64
        ring = np.column_stack([np.cos(ring_ang), np.sin(ring_ang)])
        return np.vstack([disc, ring, [[0.0, 0.0]], self.graph_controls(t, x)])

    # -------------------- audits --------------------

    def verify_sup_formula(self, t: float, x: float, ps=None,
                           n_cloud: int = 4096, seed: int = 0):
        """Residual H(t,x,p) - sup_a [p f - l] over a dual mesh.

        Nonnegative up to float because every (f, l) is an epigraph member;
        small because graph controls recover the discrete conjugate.
        """
        Hm = self.entry.hamiltonian
        if ps is None:
            pr = 1.2 * float(Hm.c(t)) * (1.0 + abs(x))
            ps = np.linspace(-pr, pr, 101)
        ps = np.asarray(ps, dtype=np.float64)
        cloud = self.control_cloud(t, x, n_cloud, seed)
        trace = self.construct(t, x, cloud)
        f = trace.e[:, 0]
        l = trace.e[:, 1]
        sup = np.max(ps[:, None] * f[None, :] - l[None, :], axis=1)
        Hvals = np.asarray(Hm.H(t, x, ps), dtype=np.float64)
        res = Hvals - sup
        i_min = int(np.argmin(res))
        i_max = int(np.argmax(res))
        return SupFormulaReport(float(res[i_min]), float(res[i_max]),
                                float(ps[i_min]), float(ps[i_max]),
                                cloud.shape[0])

    def verify_sandwich(self, t: float, x: float, n_cloud: int = 2048,
                        seed: int = 0, member_tol: float = 1e-6):
        """Every selected point is an epigraph member; graph controls are
        reproduced exactly; the selected velocities cover the domain."""
        geo = self.section_geometry(t, x)
        cloud = self.control_cloud(t, x, n_cloud, seed)
        trace = self.construct(t, x, cloud)
        Lsec = geo.section.L
        fvals = trace.e[:, 0]
        lvals = trace.e[:, 1]
        needed = np.asarray(Lsec(np.clip(fvals, geo.section.dom_lo,
                                         geo.section.dom_hi)), dtype=np.float64)
        slack = lvals - needed
        # velocity excursions outside the domain are violations outright
        outside = (fvals < geo.section.dom_lo - member_tol) | \
            (fvals > geo.section.dom_hi + member_tol)
        slack = np.where(outside, -INF, slack)
        min_slack = float(np.min(slack))

        gc = self.graph_controls(t, x)
        gtrace = self.construct(t, x, gc)
        recovery = float(np.max(np.abs(gtrace.e - geo.graph))) if gc.size else 0.0

        width = geo.section.dom_width
        if width > 0:
            covered = (np.max(fvals) - np.min(fvals)) / width
        else:
            covered = 1.0
        return SandwichReport(min_slack, recovery, float(covered),
                              cloud.shape[0])

    def audit_lipschitz(self, t: float, R: float, n_pairs: int = 256,
                        n_x: int = 9, seed: int = 0):
        """Empirical joint (x, a) Lipschitz rate of e against the declared
        dimension-only bound."""
        rng = np.random.default_rng(seed)
        xs = np.linspace(-R, R, n_x)
        traces = {}
        controls = rng.uniform(-1.0, 1.0, size=(n_pairs, 2, 2))
        controls /= np.maximum(1.0, np.linalg.norm(controls, axis=2))[:, :, None]
        emp = 0.0
        arg = (0.0, 0.0)
        for _ in range(n_pairs):
            i, j = rng.integers(0, n_x, 2)
            a = controls[_, 0]
            b = controls[_, 1]
            for xi, ai in ((xs[i], a), (xs[j], b)):
                if (xi, tuple(ai)) not in traces:
                    traces[(xi, tuple(ai))] = self.e(t, xi, ai)
            denom = abs(xs[i] - xs[j]) + float(np.linalg.norm(a - b))
            if denom < 1e-12:
                continue
            diff = float(np.linalg.norm(traces[(xs[i], tuple(a))]
                                        - traces[(xs[j], tuple(b))]))
            ratio = diff / denom
            if ratio > emp:
                emp = ratio
                arg = (float(xs[i]), float(xs[j]))
        bnd = lipschitz_bound(self.entry, t, R)
        return LipschitzReport(emp <= bnd, emp, bnd, arg)

    def continuity_jump(self, t: float, x0: float, eps: float = 1e-6,
                        n_cloud: int = 512, seed: int = 0) -> float:
        """sup over controls of the one-sided jumps |e(t, x0 +- eps, a) -
        e(t, x0, a)|; catches discontinuities sitting exactly at x0."""
        cloud = self.control_cloud(t, x0, n_cloud, seed)
        keep = np.linalg.norm(cloud, axis=1) <= 1.0
        cloud = cloud[keep]
        mid = self.construct(t, x0, cloud)
        worst = 0.0
        for xs in (x0 - eps, x0 + eps):
            side = self.construct(t, xs, cloud)
            worst = max(worst, float(np.max(np.linalg.norm(side.e - mid.e,
                                                           axis=1))))
        return worst


@dataclass(frozen=True)
class SupFormulaReport:
    residual_min: float
    residual_max: float
    p_at_min: float
    p_at_max: float
    n_controls: int


@dataclass(frozen=True)
class SandwichReport:
    membership_min_slack: float
    graph_recovery_error: float
    velocity_coverage: float
    n_controls: int


@dataclass(frozen=True)
class LipschitzReport:
    passed: bool
    empirical: float
    bound: float
    arg_worst: tuple


# ============================================================
# explicit triples: continuity probe and bound extraction
# ============================================================

def sample_base_controls(control_set, n: int = 256) -> list:
    """Deterministic sample of a declared base control set.

    Grids use odd counts so the center and the extremes are hit exactly.
    """
    if control_set.kind == "interval":
        return [float(a) for a in np.linspace(-1.0, 1.0, n | 1)]
    if control_set.kind == "box":
        k = max(3, int(np.sqrt(n)) | 1)
        g = np.linspace(-1.0, 1.0, k)
        return [(float(a1), float(a2)) for a1 in g for a2 in g]
    if control_set.kind == "disc":
        k = max(4, int(np.sqrt(n)))
        out = [(0.0, 0.0)]
        for r in np.linspace(1.0 / k, 1.0, k):
            m = max(4, int(np.ceil(2 * np.pi * r * k)))
            ang = 2.0 * np.pi * np.arange(m) / m
            out.extend((float(r * np.cos(t)), float(r * np.sin(t))) for t in ang)
        return out
    raise ValueError(f"unknown control set kind {control_set.kind!r}")


def triple_jump(triple, t: float, x0: float, eps: float = 1e-6,
                n: int = 256) -> float:
    """sup over base controls of the one-sided (f, l) jumps at x0."""
    worst = 0.0
    for a in sample_base_controls(triple.control_set, n):
        f0 = triple.f(t, x0, a)
        l0 = triple.l(t, x0, a)
        for xs in (x0 - eps, x0 + eps):
            df = abs(triple.f(t, xs, a) - f0)
            dl = abs(triple.l(t, xs, a) - l0)
            worst = max(worst, float(np.hypot(df, dl)))
    return worst


def bound_from_triple(triple, n: int = 256) -> Callable:
    """lambda(t, x) = sup over the base set of l(t, x, a).

    Any representation's running cost dominates L on its domain, so this is
    a valid upper bound; it inherits the triple's x-regularity.
    """
    controls = None

    def lam(t, x):
        nonlocal controls
        if controls is None:
            controls = sample_base_controls(triple.control_set, n)
        return max(float(triple.l(t, x, a)) for a in controls)

    return lam


def with_bound(entry, lam: Callable):
    """A copy of the catalog entry carrying the given upper bound."""
    from dataclasses import replace

    new_L = replace(entry.lagrangian, lam=lam)
    return replace(entry, lagrangian=new_L, bounded_above=True)


def triple_sup(triple, t: float, x: float, p: float, n: int = 512) -> float:
    """sup over the base set of p f - l for an explicit triple."""
    best = -INF
    for a in sample_base_controls(triple.control_set, n):
        best = max(best, p * float(triple.f(t, x, a)) - float(triple.l(t, x, a)))
    return best


# ============================================================
# trace io
# ============================================================

TRACE_COLUMNS = ["a1", "a2", "omega", "d", "e_f", "e_l", "cap_verts", "t", "x"]


def save_trace_csv(trace: ConstructionTrace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for k in range(trace.controls.shape[0]):
            w.writerow([repr(float(trace.controls[k, 0])),
                        repr(float(trace.controls[k, 1])),
                        repr(float(trace.omega)),
                        repr(float(trace.dist[k])),
                        repr(float(trace.e[k, 0])),
                        repr(float(trace.e[k, 1])),
                        int(trace.cap_verts[k]),
                        repr(float(trace.t)),
                        repr(float(trace.x))])


def load_trace_csv(path) -> ConstructionTrace:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"no rows in {path}")
        idx = {name: header.index(name) for name in TRACE_COLUMNS
               if name in header}
        for row in reader:
            if row:
                rows.append([float(row[idx[n]]) if n in idx else np.nan
                             for n in TRACE_COLUMNS])
    if not rows:
        raise ValueError(f"no rows in {path}")
    arr = np.array(rows)
    return ConstructionTrace(float(arr[0, 7]), float(arr[0, 8]),
                             float(arr[0, 2]),
                             arr[:, 0:2].copy(), arr[:, 4:6].copy(),
                             arr[:, 3].copy(), arr[:, 6].copy())
