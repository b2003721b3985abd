"""Discretized fixed-horizon Bolza problems and their DP solvers.

Two discrete problems share one backward value sweep:

* the variational form: minimize  phi(x(0), x(1)) + sum_k h_t L(t_k, x_k, v_k)
  over grid arcs with explicit-Euler steps x_{k+1} = x_k + h_t v_k and
  velocities kept inside the growth window |v| <= c(t)(1 + |x|);
* the control form: same endpoint cost, running cost l(t_k, x_k, a_k) and
  steps x_{k+1} = x_k + h_t f(t_k, x_k, a_k), minimized over a sampled
  unit-ball control set (graph controls plus a low-discrepancy cloud, the
  same augmentation the sup-formula audit uses).

Running costs use the left endpoint of each step.  Values interpolate
linearly between state nodes and +inf propagates through interpolation, so
properness survives discretization.  State grids must contain the Gronwall
reach (M + int c) * exp(int c) of feasible arcs; smaller grids are
rejected up front.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from . import _kernels, models
from .epigraph import OPEN_DOM_INSET
from .representation import Representation

INF = np.inf

_trapz = getattr(np, "trapezoid", None) or np.trapz

DEFAULT_N_T = 50
DEFAULT_N_X = 201
DEFAULT_N_V = 65
DEFAULT_N_CLOUD = 32


# ============================================================
# Gronwall bookkeeping
# ============================================================

def gronwall_radius(bound_m: float, c_samples, span: float = 1.0) -> float:
    """Reach (M + int c) * exp(int c) of arcs obeying the growth window.

    `c_samples` are uniformly spaced growth-rate samples covering `span`
    time units; the integral is the trapezoid rule.  A single sample is
    read as a constant rate.
    """
    if not np.isfinite(bound_m) or bound_m < 0.0:
        raise ValueError("endpoint bound must be finite and nonnegative")
    if span < 0.0:
        raise ValueError("horizon span must be nonnegative")
    c = np.atleast_1d(np.asarray(c_samples, dtype=np.float64))
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise ValueError("growth samples must be a nonempty finite array")
    if np.any(c < 0.0):
        raise ValueError("growth samples must be nonnegative")
    if c.size == 1:
        integral = float(c[0]) * span
    else:
        integral = float(_trapz(c, dx=span / (c.size - 1)))
    return float((bound_m + integral) * math.exp(integral))


# ============================================================
# problem specification
# ============================================================

@dataclass(frozen=True)
class BolzaSpec:
    """One discretized Bolza problem on the horizon [t0, t1].

    Endpoint cost, exactly one of three shapes:

    * ``endpoint``: a general proper cost phi(z, x) of start z and end x;
    * ``start`` (plus optional ``terminal``): the arc is pinned to
      x(t0) = start and charged terminal(x(t1)), zero if terminal is None;
    * ``terminal`` alone: free start, terminal charge only; this is the
      shape value tables are built from.

    ``bound_m`` bounds min(|z|, |x|) over the finite set of the endpoint
    cost.  The state grid half-width must cover the Gronwall reach
    computed from it; ``radius`` None means exactly that reach.
    """

    bound_m: float
    endpoint: Optional[Callable] = None
    start: Optional[float] = None
    terminal: Optional[Callable] = None
    n_t: int = DEFAULT_N_T
    n_x: int = DEFAULT_N_X
    radius: Optional[float] = None
    t0: float = 0.0
    t1: float = 1.0

    def __post_init__(self):
        if self.endpoint is not None and (self.start is not None
                                          or self.terminal is not None):
            raise ValueError("give either a general endpoint cost or a "
                             "start/terminal pair, not both")
        if self.endpoint is None and self.start is None \
                and self.terminal is None:
            raise ValueError("an endpoint cost is required "
                             "(endpoint, start, or terminal)")
        if not np.isfinite(self.bound_m) or self.bound_m < 0.0:
            raise ValueError("bound_m must be finite and nonnegative")
        if self.n_t < 1:
            raise ValueError("need at least one time step")
        if self.n_x < 2:
            raise ValueError("need at least two state nodes")
        if self.t1 < self.t0:
            raise ValueError("horizon must run forward")
        if self.radius is not None and \
                (not np.isfinite(self.radius) or self.radius <= 0.0):
            raise ValueError("state grid radius must be finite and positive")

    @staticmethod
    def pinned(start: float, terminal: Optional[Callable] = None,
               bound_m: Optional[float] = None, **kw) -> "BolzaSpec":
        """Pinned-start problem; min(|z|, |x|) <= |start| holds on the pin."""
        m = abs(float(start)) if bound_m is None else float(bound_m)
        return BolzaSpec(bound_m=m, start=float(start), terminal=terminal,
                         **kw)

    def endpoint_cost(self, z: float, x: float) -> float:
        if self.endpoint is not None:
            return float(self.endpoint(z, x))
        if self.start is not None and abs(z - self.start) > 1e-12:
            return INF
        return 0.0 if self.terminal is None else float(self.terminal(x))


# ============================================================
# grids and slice evaluation
# ============================================================

def _eval_vec(fn: Callable, xs: np.ndarray) -> np.ndarray:
    """Evaluate a scalar-or-vectorized callable on a node array."""
    try:
        out = np.asarray(fn(xs), dtype=np.float64)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(x))) for x in xs], dtype=np.float64)


def _grids(spec: BolzaSpec, c: Callable):
    """Time and state grids; rejects grids below the Gronwall reach."""
    ts = np.linspace(spec.t0, spec.t1, spec.n_t + 1)
    cs = np.array([float(c(t)) for t in ts], dtype=np.float64)
    reach = gronwall_radius(spec.bound_m, cs, span=spec.t1 - spec.t0)
    r = reach if spec.radius is None else float(spec.radius)
    if r < reach - 1e-12:
        raise ValueError(f"state grid radius {r:g} is below the Gronwall "
                         f"reach {reach:g}")
    if r <= 0.0:
        r = 1.0  # degenerate reach (M = 0, c = 0): keep a unit window
    xs = np.linspace(-r, r, spec.n_x)
    return ts, xs, reach


def _terminal_slice(spec: BolzaSpec, xs: np.ndarray) -> np.ndarray:
    if spec.terminal is None:
        return np.zeros_like(xs)
    return _eval_vec(spec.terminal, xs)


# ============================================================
# per-step move/cost tables
# ============================================================

def _variational_row(lag: models.LagrangianModel, c: Callable, t: float,
                     x: float, n_v: int):
    """Velocity samples and running costs at one (t, x)."""
    lo, hi = lag.dom(t, x)
    w = float(c(t)) * (1.0 + abs(x))
    lo2, hi2 = max(float(lo), -w), min(float(hi), w)
    if lo2 > hi2:
        return np.zeros(n_v), np.full(n_v, INF)
    if hi2 > lo2:
        vs = np.linspace(lo2, hi2, n_v)
    else:
        vs = np.full(n_v, lo2)
    if lag.open_dom and hi > lo:
        inset = OPEN_DOM_INSET * (hi - lo)
        vs = np.clip(vs, lo + inset, hi - inset)
    ls = np.asarray(lag.L(t, x, vs), dtype=np.float64)
    return vs, np.atleast_1d(ls)


def _variational_step(lag, c, ts, xs, n_v, k):
    t = float(ts[k])
    n_x = xs.shape[0]
    moves = np.empty((n_x, n_v))
    costs = np.empty((n_x, n_v))
    for j in range(n_x):
        moves[j], costs[j] = _variational_row(lag, c, t, float(xs[j]), n_v)
    return moves, costs


def _control_static_cloud(n_cloud: int, seed: int) -> np.ndarray:
    """Low-discrepancy unit-disc controls plus the origin, sampled once
    per solve; controls live in the fixed unit ball, so the cloud is
    shared by every section while graph controls are appended per node."""
    if n_cloud <= 0:
        return np.zeros((1, 2))
    sob = qmc.Sobol(d=2, scramble=True, seed=seed).random(n_cloud)
    r = np.sqrt(sob[:, 0])
    th = 2.0 * np.pi * sob[:, 1]
    disc = np.column_stack([r * np.cos(th), r * np.sin(th)])
    return np.vstack([disc, [[0.0, 0.0]]])


def _control_row(rep: Representation, static: np.ndarray, t: float, x: float):
    """Sampled controls and their selected (f, l) at one (t, x)."""
    controls = np.vstack([static, rep.graph_controls(t, x)])
    trace = rep.construct(t, x, controls)
    return trace.e[:, 0], trace.e[:, 1], controls


def _control_step(rep, static, ts, xs, n_mv, k):
    t = float(ts[k])
    n_x = xs.shape[0]
    moves = np.zeros((n_x, n_mv))
    costs = np.full((n_x, n_mv), INF)
    for j in range(n_x):
        f, l, _ = _control_row(rep, static, t, float(xs[j]))
        m = f.shape[0]
        moves[j, :m] = f
        costs[j, :m] = l
    return moves, costs


# ============================================================
# backward sweep and greedy rollout
# ============================================================

def _sweep(ts, xs, terminal_slice, step_tables):
    """Backward DP; returns the full (n_t+1, n_x) value array."""
    n_t = ts.shape[0] - 1
    h_t = float(ts[1] - ts[0]) if n_t >= 1 else 0.0
    values = np.empty((n_t + 1, xs.shape[0]))
    values[n_t] = terminal_slice
    for k in range(n_t - 1, -1, -1):
        mv, cs = step_tables(k)
        values[k], _ = _kernels.dp_backward_step(xs, mv, cs, values[k + 1],
                                                 h_t)
    return values


def _rollout(ts, xs, values, x0, step_local):
    """Greedy forward arc from x0 against the stored value slices.

    step_local(k, x) -> (moves, costs, payload rows); returns the arc and
    the picked payload rows (controls, or None entries for velocities).
    """
    n_t = ts.shape[0] - 1
    h_t = float(ts[1] - ts[0]) if n_t >= 1 else 0.0
    hx = float(xs[1] - xs[0])
    arc = np.empty(n_t + 1)
    arc[0] = x0
    picks = []
    x = float(x0)
    for k in range(n_t):
        mv, cs, pay = step_local(k, x)
        best = INF
        bi = -1
        for i in range(mv.shape[0]):
            if cs[i] == INF:
                continue
            vn = _kernels.interp1_inf(xs[0], hx, values[k + 1],
                                      x + h_t * float(mv[i]))
            if vn == INF:
                continue
            val = h_t * float(cs[i]) + vn
            if val < best:
                best = val
                bi = i
        if bi < 0:
            bi = int(np.argmin(np.abs(mv)))  # dead end: hold position
        x = x + h_t * float(mv[bi])
        arc[k + 1] = x
        picks.append(None if pay is None else np.asarray(pay[bi], float))
    return arc, picks


# ============================================================
# solutions and value tables
# ============================================================

@dataclass(frozen=True)
class ValueTable:
    """Value samples V(t_k, x_j) on a uniform time-by-state grid."""

    ts: np.ndarray
    xs: np.ndarray
    values: np.ndarray  # (n_t + 1, n_x)

    @property
    def terminal(self) -> np.ndarray:
        return self.values[-1]

    def interpolate(self, t: float, x: float) -> float:
        """Bilinear value with +inf propagation, +inf off the grid."""
        if self.ts.shape[0] == 1:
            if abs(t - float(self.ts[0])) > 1e-12:
                return INF
            return _kernels.interp1_inf(self.xs[0],
                                        float(self.xs[1] - self.xs[0]),
                                        self.values[0], x)
        h_t = float(self.ts[1] - self.ts[0])
        u = (t - float(self.ts[0])) / h_t
        if u < -1e-12 or u > self.ts.shape[0] - 1 + 1e-12:
            return INF
        i = min(max(int(np.floor(u)), 0), self.ts.shape[0] - 2)
        w = u - i
        hx = float(self.xs[1] - self.xs[0])
        lo = _kernels.interp1_inf(self.xs[0], hx, self.values[i], x)
        if w <= 1e-12:
            return lo
        hi = _kernels.interp1_inf(self.xs[0], hx, self.values[i + 1], x)
        if w >= 1.0 - 1e-12:
            return hi
        if lo == INF or hi == INF:
            return INF
        return float(lo + w * (hi - lo))


def table_lipschitz(table: ValueTable) -> float:
    """Largest difference quotient of V(t, .) between adjacent finite
    nodes, over all time slices."""
    hx = float(table.xs[1] - table.xs[0])
    worst = 0.0
    for row in table.values:
        fin = np.isfinite(row[:-1]) & np.isfinite(row[1:])
        if np.any(fin):
            worst = max(worst,
                        float(np.max(np.abs(row[1:] - row[:-1])[fin])) / hx)
    return worst


@dataclass(frozen=True)
class BolzaSolution:
    """DP minimum with a greedy argmin arc and the value sweep behind it."""

    value: float
    ts: np.ndarray
    xs: np.ndarray
    arc: Optional[np.ndarray]  # (n_t + 1,) states, None when infeasible
    controls: Optional[np.ndarray]  # (n_t, 2) picked controls, control runs
    feasible: bool
    table: ValueTable


def _finish(spec, ts, xs, values, step_local, with_controls):
    """Extract the minimum and roll out its arc from a finished sweep."""
    hx = float(xs[1] - xs[0])
    if spec.start is not None:
        x0 = float(spec.start)
        value = _kernels.interp1_inf(xs[0], hx, values[0], x0)
    else:
        j0 = int(np.argmin(values[0]))
        x0 = float(xs[j0])
        value = float(values[0][j0])
    table = ValueTable(ts, xs, values)
    if value == INF:
        return BolzaSolution(INF, ts, xs, None, None, False, table)
    arc, picks = _rollout(ts, xs, values, x0, step_local)
    controls = None
    if with_controls:
        controls = np.array([p for p in picks], dtype=np.float64)
    return BolzaSolution(float(value), ts, xs, arc, controls, True, table)


def _resolve_variational(model, growth):
    if isinstance(model, models.ExampleCatalogEntry):
        return model.lagrangian, model.hamiltonian.c
    if isinstance(model, models.LagrangianModel):
        if growth is None:
            raise ValueError("a growth rate c(t) is required with a bare "
                             "Lagrangian model")
        return model, growth
    raise TypeError("expected a catalog entry or a Lagrangian model")


def _general_endpoint_sweeps(spec, ts, xs, step_tables):
    """Endpoint costs coupling both ends: one backward sweep per start
    node z (terminal slice phi(z, .)), reusing the per-step tables; the
    winner's sweep is recomputed once to keep its slices."""
    n_x = xs.shape[0]
    best_val, best_j = INF, -1
    for j in range(n_x):
        z = float(xs[j])
        tslice = np.array([spec.endpoint_cost(z, float(x)) for x in xs])
        values = _sweep(ts, xs, tslice, step_tables)
        if values[0][j] < best_val:
            best_val, best_j = float(values[0][j]), j
    if best_j < 0:
        tslice = np.full(n_x, INF)
        return np.tile(tslice, (ts.shape[0], 1)), None
    z = float(xs[best_j])
    tslice = np.array([spec.endpoint_cost(z, float(x)) for x in xs])
    return _sweep(ts, xs, tslice, step_tables), z


def solve_variational(spec: BolzaSpec, model, growth: Optional[Callable] = None,
                      n_v: int = DEFAULT_N_V) -> BolzaSolution:
    """Backward DP for the variational form; `model` is a catalog entry or
    a Lagrangian model plus an explicit growth rate."""
    lag, c = _resolve_variational(model, growth)
    ts, xs, _ = _grids(spec, c)

    steps = {}

    def tables(k):
        if k not in steps:
            steps[k] = _variational_step(lag, c, ts, xs, n_v, k)
        return steps[k]

    def local(k, x):
        vs, ls = _variational_row(lag, c, float(ts[k]), float(x), n_v)
        return vs, ls, None

    if spec.endpoint is not None:
        values, z = _general_endpoint_sweeps(spec, ts, xs, tables)
        if z is None:
            table = ValueTable(ts, xs, values)
            return BolzaSolution(INF, ts, xs, None, None, False, table)
        pinned = BolzaSpec(bound_m=spec.bound_m, start=z,
                           terminal=lambda x, _z=z: spec.endpoint_cost(_z, x),
                           n_t=spec.n_t, n_x=spec.n_x, radius=spec.radius,
                           t0=spec.t0, t1=spec.t1)
        return _finish(pinned, ts, xs, values, local, False)
    values = _sweep(ts, xs, _terminal_slice(spec, xs), tables)
    return _finish(spec, ts, xs, values, local, False)


def solve_control(spec: BolzaSpec, rep: Representation,
                  n_cloud: int = DEFAULT_N_CLOUD,
                  seed: int = 0) -> BolzaSolution:
    """Backward DP for the control form over sampled unit-ball controls."""
    c = rep.entry.hamiltonian.c
    ts, xs, _ = _grids(spec, c)
    static = _control_static_cloud(n_cloud, seed)
    n_mv = static.shape[0] + rep.n_graph

    steps = {}

    def tables(k):
        if k not in steps:
            steps[k] = _control_step(rep, static, ts, xs, n_mv, k)
        return steps[k]

    def local(k, x):
        f, l, controls = _control_row(rep, static, float(ts[k]), float(x))
        return f, l, controls

    if spec.endpoint is not None:
        values, z = _general_endpoint_sweeps(spec, ts, xs, tables)
        if z is None:
            table = ValueTable(ts, xs, values)
            return BolzaSolution(INF, ts, xs, None, None, False, table)
        pinned = BolzaSpec(bound_m=spec.bound_m, start=z,
                           terminal=lambda x, _z=z: spec.endpoint_cost(_z, x),
                           n_t=spec.n_t, n_x=spec.n_x, radius=spec.radius,
                           t0=spec.t0, t1=spec.t1)
        return _finish(pinned, ts, xs, values, local, True)
    values = _sweep(ts, xs, _terminal_slice(spec, xs), tables)
    return _finish(spec, ts, xs, values, local, True)


def value_function(spec: BolzaSpec, source: str, *, model=None,
                   rep: Optional[Representation] = None,
                   growth: Optional[Callable] = None,
                   n_v: int = DEFAULT_N_V, n_cloud: int = DEFAULT_N_CLOUD,
                   seed: int = 0) -> ValueTable:
    """Full value table V(t_k, x_j) for a terminal-cost spec.

    `source` picks the running model: "variational" (needs `model`) or
    "control" (needs `rep`).  A zero-length horizon returns the terminal
    cost itself.
    """
    if spec.terminal is None or spec.start is not None \
            or spec.endpoint is not None:
        raise ValueError("value tables need a terminal-cost spec")
    if source == "variational":
        lag, c = _resolve_variational(model, growth)
    elif source == "control":
        if rep is None:
            raise ValueError("control source needs a representation")
        c = rep.entry.hamiltonian.c
    else:
        raise ValueError(f"unknown source {source!r}")
    if spec.t1 == spec.t0:
        _, xs, _ = _grids(BolzaSpec(bound_m=spec.bound_m,
                                    terminal=spec.terminal, n_t=1,
                                    n_x=spec.n_x, radius=spec.radius,
                                    t0=0.0, t1=1.0), c)
        return ValueTable(np.array([spec.t0]), xs,
                          _terminal_slice(spec, xs)[None, :])
    ts, xs, _ = _grids(spec, c)
    if source == "variational":
        def tables(k):
            return _variational_step(lag, c, ts, xs, n_v, k)
    else:
        static = _control_static_cloud(n_cloud, seed)
        n_mv = static.shape[0] + rep.n_graph

        def tables(k):
            return _control_step(rep, static, ts, xs, n_mv, k)
    values = _sweep(ts, xs, _terminal_slice(spec, xs), tables)
    return ValueTable(ts, xs, values)


# ============================================================
# lower-bound audit
# ============================================================

@dataclass(frozen=True)
class LowerBoundReport:
    """Constants of the a priori floor -D - R*int k_R - int |H(t,0,0)|."""

    bound: float
    offset: float  # D, endpoint-cost floor on the Gronwall ball
    radius: float  # R, Gronwall reach
    rate_integral: float  # int k_R(t, R) dt
    center_integral: float  # int |H(t, 0, 0)| dt


def lower_bound_report(spec: BolzaSpec,
                       entry: models.ExampleCatalogEntry) -> LowerBoundReport:
    """Floor every feasible cost respects: endpoint floor plus the running
    cost's worst drop along arcs inside the Gronwall ball."""
    Hm = entry.hamiltonian
    ts, xs, reach = _grids(spec, Hm.c)
    ball = xs[np.abs(xs) <= reach + 1e-12]
    if ball.size == 0:
        ball = np.array([0.0])
    if spec.endpoint is not None:
        vals = np.array([spec.endpoint_cost(float(z), float(x))
                         for z in ball for x in ball])
    elif spec.start is not None:
        vals = np.array([spec.endpoint_cost(spec.start, float(x))
                         for x in ball])
    else:
        vals = _eval_vec(spec.terminal, ball)
    finite = vals[np.isfinite(vals)]
    if finite.size == 0:
        return LowerBoundReport(-INF, INF, reach, 0.0, 0.0)
    offset = max(0.0, -float(np.min(finite)))
    span = spec.t1 - spec.t0
    if spec.n_t >= 1 and span > 0:
        dx = span / spec.n_t
        rate = float(_trapz([float(Hm.k_R(t, reach)) for t in ts], dx=dx))
        center = float(_trapz([abs(float(Hm.H(t, 0.0, 0.0))) for t in ts],
                              dx=dx))
    else:
        rate = center = 0.0
    return LowerBoundReport(-offset - reach * rate - center, offset, reach,
                            rate, center)


# ============================================================
# file formats
# ============================================================

def save_value_csv(table: ValueTable, path: str) -> None:
    """Value table as CSV rows t,x,V (time-major)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "V"])
        for k, t in enumerate(table.ts):
            for j, x in enumerate(table.xs):
                w.writerow([f"{t:.17g}", f"{x:.17g}",
                            f"{table.values[k, j]:.17g}"])


def load_value_csv(path: str) -> ValueTable:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head = rows[0]
    it, ix, iv = head.index("t"), head.index("x"), head.index("V")
    data = np.array([[float(r[it]), float(r[ix]), float(r[iv])]
                     for r in rows[1:]])
    ts = np.unique(data[:, 0])
    xs = np.unique(data[:, 1])
    values = data[:, 2].reshape(ts.shape[0], xs.shape[0])
    return ValueTable(ts, xs, values)


def save_arc_csv(solution: BolzaSolution, path: str) -> None:
    """Argmin arc as CSV rows t,x plus control columns for control runs;
    the terminal row carries no control and is padded with nan."""
    if solution.arc is None:
        raise ValueError("infeasible solution has no arc")
    with_a = solution.controls is not None
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "a1", "a2"] if with_a else ["t", "x"])
        for k, t in enumerate(solution.ts):
            row = [f"{t:.17g}", f"{solution.arc[k]:.17g}"]
            if with_a:
                if k < solution.controls.shape[0]:
                    row += [f"{solution.controls[k, 0]:.17g}",
                            f"{solution.controls[k, 1]:.17g}"]
                else:
                    row += ["nan", "nan"]
            w.writerow(row)


def load_arc_csv(path: str):
    """Returns (ts, arc, controls-or-None)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head = rows[0]
    body = rows[1:]
    ts = np.array([float(r[head.index("t")]) for r in body])
    arc = np.array([float(r[head.index("x")]) for r in body])
    if "a1" not in head:
        return ts, arc, None
    i1, i2 = head.index("a1"), head.index("a2")
    controls = np.array([[float(r[i1]), float(r[i2])] for r in body[:-1]])
    return ts, arc, controls


TERMINAL_FORMS = {
    "zero": lambda x: np.zeros_like(np.asarray(x, dtype=np.float64)),
    "abs": np.abs,
}


def spec_from_dict(d: dict) -> BolzaSpec:
    """Build a spec from a plain mapping (the config-file schema).

    Keys: bound_m (required, number); start (number or null); terminal
    (name from TERMINAL_FORMS, or null); n_t, n_x (ints); radius (number
    or null); t0, t1 (numbers).  General endpoint costs are code-only.
    """
    known = {"bound_m", "start", "terminal", "n_t", "n_x", "radius",
             "t0", "t1"}
    extra = set(d) - known
    if extra:
        raise ValueError(f"unknown spec keys: {sorted(extra)}")
    if "bound_m" not in d:
        raise ValueError("spec config needs bound_m")
    term = d.get("terminal")
    if term is not None:
        if term not in TERMINAL_FORMS:
            raise ValueError(f"unknown terminal form {term!r}; "
                             f"have {sorted(TERMINAL_FORMS)}")
        term = TERMINAL_FORMS[term]
    return BolzaSpec(bound_m=float(d["bound_m"]),
                     start=None if d.get("start") is None
                     else float(d["start"]),
                     terminal=term,
                     n_t=int(d.get("n_t", DEFAULT_N_T)),
                     n_x=int(d.get("n_x", DEFAULT_N_X)),
                     radius=None if d.get("radius") is None
                     else float(d["radius"]),
                     t0=float(d.get("t0", 0.0)),
                     t1=float(d.get("t1", 1.0)))


def load_spec_json(path: str) -> BolzaSpec:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))
