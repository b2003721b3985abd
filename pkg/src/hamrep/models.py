"""Hamiltonian/Lagrangian model pairs, the example catalog, and the
numerical audits of the structural conditions they are supposed to satisfy.

A Hamiltonian model carries H(t, x, p) (convex in p) together with its
growth rate c(t) (slope bound c(t)(1+|x|) in p) and a local Lipschitz
family k_R(t).  The paired Lagrangian is the p-conjugate with effective
domain inside the ball of radius c(t)(1+|x|).  Checks sample declared
plans, report worst violations with their argument, and never average
away a failure.

The bounded-above audit (is L <= lambda on its domain with lambda locally
Lipschitz?) is the gate for faithful compact-control representability;
the catalog's EX4 is the stock counterexample.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .conjugate import GridFunction, conjugate_grid

INF = np.inf

DEFAULT_T_NODES = 11  # uniform grid on [0, T]


# ============================================================
# model containers
# ============================================================

@dataclass(frozen=True)
class HamiltonianModel:
    name: str
    n: int
    H: Callable  # H(t, x, p), numpy-vectorized in p
    c: Callable  # growth rate c(t) >= 0
    k_R: Callable  # k_R(t, R), local Lipschitz rate in x
    T: float = 1.0
    continuous: bool = True
    notes: str = ""


@dataclass(frozen=True)
class LagrangianModel:
    name: str
    n: int
    L: Callable  # L(t, x, v), numpy-vectorized in v, +inf outside dom
    dom: Callable  # dom(t, x) -> (lo, hi)
    open_dom: bool = False
    lam: Optional[Callable] = None  # upper bound lambda(t, x) on dom, if any
    provenance: str = "closed-form"


@dataclass(frozen=True)
class ControlSet:
    """Base control set descriptor for explicit triples."""

    kind: str  # "box" | "disc" | "interval"
    dim: int


@dataclass(frozen=True)
class ExplicitTriple:
    """A known (A, f, l) representation used as a reference in audits."""

    control_set: ControlSet
    f: Callable  # f(t, x, a)
    l: Callable  # l(t, x, a)
    lipschitz: bool
    notes: str = ""


@dataclass(frozen=True)
class ExampleCatalogEntry:
    key: str
    description: str
    hamiltonian: HamiltonianModel
    lagrangian: LagrangianModel
    bounded_above: bool  # does L admit a locally Lipschitz upper bound?
    p_window: Callable  # adequate conjugation window radius at given x
    interior_fraction: float  # dom fraction where closed forms are compared
    lipschitz_triple: Optional[ExplicitTriple] = None
    graphical_triple: Optional[ExplicitTriple] = None
    family: Optional[Callable] = None  # factory of non-unique triples


# ============================================================
# catalog
# ============================================================

def _ex1_H(t, x, p):
    return np.maximum(np.abs(p) * abs(x) - 1.0, 0.0)


def _ex1_L(t, x, v):
    v = np.asarray(v, dtype=np.float64)
    ax = abs(x)
    if ax == 0.0:
        out = np.where(np.abs(v) <= 1e-300, 0.0, INF)
    else:
        out = np.where(np.abs(v) <= ax, np.abs(v) / ax, INF)
    return out if out.ndim else float(out)


def _ex2_H(t, x, p):
    return np.sqrt(1.0 + np.asarray(p, dtype=np.float64) ** 2) - abs(x)


def _ex2_L(t, x, v):
    v = np.asarray(v, dtype=np.float64)
    out = np.where(np.abs(v) <= 1.0, abs(x) - np.sqrt(np.clip(1.0 - v * v, 0.0, None)), INF)
    return out if out.ndim else float(out)


def _ex4_H(t, x, p):
    xp = np.abs(np.asarray(p, dtype=np.float64) * x)
    return np.where(xp > 1.0, (np.sqrt(xp) - 1.0) ** 2, 0.0)


def _ex4_L(t, x, v):
    v = np.asarray(v, dtype=np.float64)
    ax = abs(x)
    if ax == 0.0:
        out = np.where(np.abs(v) <= 1e-300, 0.0, INF)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(np.abs(v) < ax, np.abs(v) / (ax - np.abs(v)), INF)
    return out if out.ndim else float(out)


def _abs_H(t, x, p):
    return np.abs(np.asarray(p, dtype=np.float64))


def _abs_L(t, x, v):
    v = np.asarray(v, dtype=np.float64)
    out = np.where(np.abs(v) <= 1.0, 0.0, INF)
    return out if out.ndim else float(out)


def _one(t):
    return 1.0


def _const(val):
    def fn(*args):
        return val
    return fn


def abs_value_family(i_fn: Callable, j_fn: Callable) -> ExplicitTriple:
    """Non-unique representations of H = |p| on A = [-1, 1].

    Any nonnegative i, j give f(x,a) = a(1+|a| i(x))/(1+i(x)) with range
    [-1, 1] and l(x,a) = (1-|a|) j(x) vanishing on the graph controls a = +-1.
    """

    def f(t, x, a):
        ia = i_fn(x)
        return a * (1.0 + abs(a) * ia) / (1.0 + ia)

    def l(t, x, a):
        return (1.0 - abs(a)) * j_fn(x)

    return ExplicitTriple(ControlSet("interval", 1), f, l, lipschitz=False,
                          notes="non-unique family for H=|p|")


def catalog() -> dict:
    """The built-in autonomous examples (T = 1, n = 1)."""
    entries = {}

    ex1_trip = ExplicitTriple(
        ControlSet("box", 2),
        lambda t, x, a: a[0] * abs(x),
        lambda t, x, a: abs(a[0]) + abs(a[1]) * (1.0 - abs(a[0])),
        lipschitz=True,
    )
    ex1_graph = ExplicitTriple(
        ControlSet("interval", 1),
        lambda t, x, a: a * abs(x),
        lambda t, x, a: (abs(a) if x != 0.0 else 0.0),
        lipschitz=False,
        notes="running cost jumps at x = 0",
    )
    entries["EX1"] = ExampleCatalogEntry(
        key="EX1",
        description="H = max(|p||x| - 1, 0); L = |v/x| on [-|x|, |x|]",
        hamiltonian=HamiltonianModel("EX1", 1, _ex1_H, _one, lambda t, R: 1.0),
        lagrangian=LagrangianModel("EX1", 1, _ex1_L,
                                   lambda t, x: (-abs(x), abs(x)),
                                   lam=_const(1.0)),
        bounded_above=True,
        p_window=lambda x: 1.5 / max(abs(x), 0.5),
        interior_fraction=0.99,
        lipschitz_triple=ex1_trip,
        graphical_triple=ex1_graph,
    )

    ex2_trip = ExplicitTriple(
        ControlSet("disc", 2),
        lambda t, x, a: a[0],
        lambda t, x, a: a[1] + abs(x),
        lipschitz=True,
    )
    ex2_graph = ExplicitTriple(
        ControlSet("interval", 1),
        lambda t, x, a: a,
        lambda t, x, a: abs(x) - np.sqrt(max(1.0 - a * a, 0.0)),
        lipschitz=False,
        notes="continuous but not Lipschitz at |a| = 1",
    )
    entries["EX2"] = ExampleCatalogEntry(
        key="EX2",
        description="H = sqrt(1+p^2) - |x|; L = |x| - sqrt(1-v^2) on [-1, 1]",
        hamiltonian=HamiltonianModel("EX2", 1, _ex2_H, _one, lambda t, R: 1.0),
        lagrangian=LagrangianModel("EX2", 1, _ex2_L,
                                   lambda t, x: (-1.0, 1.0),
                                   lam=lambda t, x: abs(x)),
        bounded_above=True,
        p_window=lambda x: 25.0,
        interior_fraction=0.99,
        lipschitz_triple=ex2_trip,
        graphical_triple=ex2_graph,
    )

    entries["EX4"] = ExampleCatalogEntry(
        key="EX4",
        description="H = (sqrt(|xp|)-1)^2 for |xp|>1 else 0; "
                    "L = |v|/(|x|-|v|) unbounded near the open domain edge",
        hamiltonian=HamiltonianModel("EX4", 1, _ex4_H, _one, lambda t, R: 1.0),
        lagrangian=LagrangianModel("EX4", 1, _ex4_L,
                                   lambda t, x: (-abs(x), abs(x)),
                                   open_dom=True, lam=None),
        bounded_above=False,
        p_window=lambda x: 130.0 / max(abs(x), 0.25),
        interior_fraction=0.9,
    )

    entries["ABS"] = ExampleCatalogEntry(
        key="ABS",
        description="H = |p|; L = indicator of [-1, 1]; non-unique families",
        hamiltonian=HamiltonianModel("ABS", 1, _abs_H, _one, lambda t, R: 0.0),
        lagrangian=LagrangianModel("ABS", 1, _abs_L,
                                   lambda t, x: (-1.0, 1.0),
                                   lam=_const(0.0)),
        bounded_above=True,
        p_window=lambda x: 3.0,
        interior_fraction=0.99,
        family=abs_value_family,
    )
    return entries


# ============================================================
# reports
# ============================================================

@dataclass
class CheckReport:
    condition: str
    passed: bool
    worst_violation: float
    arg_worst: tuple
    empirical_constant: Optional[float] = None
    tolerance: float = 0.0
    notes: str = ""

    def to_json_dict(self):
        d = asdict(self)
        d["passed"] = bool(self.passed)
        d["worst_violation"] = float(self.worst_violation)
        d["tolerance"] = float(self.tolerance)
        if self.empirical_constant is not None:
            d["empirical_constant"] = float(self.empirical_constant)
        d["arg_worst"] = [float(v) for v in np.atleast_1d(np.array(self.arg_worst, dtype=float))]
        return d


def merge_reports(a: CheckReport, b: CheckReport) -> CheckReport:
    """Associative worst-case combination of two partial reports."""
    if a.condition != b.condition:
        raise ValueError("cannot merge different conditions")
    worse = a if a.worst_violation >= b.worst_violation else b
    emp = None
    if a.empirical_constant is not None or b.empirical_constant is not None:
        emp = max(a.empirical_constant or -INF, b.empirical_constant or -INF)
    return CheckReport(a.condition, a.passed and b.passed, worse.worst_violation,
                       worse.arg_worst, emp, max(a.tolerance, b.tolerance),
                       a.notes or b.notes)


def reports_to_json(reports, path=None) -> str:
    payload = {"reports": [r.to_json_dict() for r in reports]}
    text = json.dumps(payload, sort_keys=True, indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def reports_to_csv(reports, path):
    import csv as _csv

    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["condition", "passed", "worst_violation", "arg_worst",
                    "empirical_constant", "tolerance", "notes"])
        for r in reports:
            w.writerow([r.condition, int(r.passed), repr(r.worst_violation),
                        ";".join(repr(float(v)) for v in np.atleast_1d(np.array(r.arg_worst, dtype=float))),
                        "" if r.empirical_constant is None else repr(r.empirical_constant),
                        repr(r.tolerance), r.notes])


# ============================================================
# sample plans
# ============================================================

@dataclass(frozen=True)
class SamplePlan:
    ts: np.ndarray
    xs: np.ndarray
    ps: np.ndarray
    pairs_xy: np.ndarray  # (k, 2) x/y pairs for locality checks
    pairs_pq: np.ndarray  # (k, 2) p/q pairs for convexity/slope checks

    @staticmethod
    def default(R: float = 2.0, p_max: float = 10.0, T: float = 1.0,
                nt: int = DEFAULT_T_NODES, k: int = 200, seed: int = 0) -> "SamplePlan":
        rng = np.random.default_rng(seed)
        ts = np.linspace(0.0, T, nt)
        xs = np.concatenate([np.linspace(-R, R, 9), rng.uniform(-R, R, k)])
        ps = np.concatenate([np.linspace(-p_max, p_max, 9), rng.uniform(-p_max, p_max, k)])
        pairs_xy = rng.uniform(-R, R, size=(k, 2))
        pairs_pq = rng.uniform(-p_max, p_max, size=(k, 2))
        return SamplePlan(ts, xs, ps, pairs_xy, pairs_pq)


# ============================================================
# structural condition checks
# ============================================================

def check_H1_H4(model: HamiltonianModel, plan: SamplePlan,
                tol: float = 1e-9) -> list:
    """Sampled audit of measurability/continuity/convexity/slope growth.

    Measurability in t is not decidable from samples; H1 reports an
    evaluability probe over the t-grid and says so.
    """
    reports = []

    # H1: evaluable and finite on the declared t-grid
    worst = 0.0
    arg = (plan.ts[0], 0.0, 0.0)
    ok = True
    for t in plan.ts:
        val = float(model.H(t, 0.0, 0.0))
        if not np.isfinite(val):
            ok = False
            worst = INF
            arg = (t, 0.0, 0.0)
    reports.append(CheckReport("H1", ok, worst, arg, tolerance=tol,
                               notes="evaluability probe only; t-measurability "
                                     "is declared, not sampled"))

    # H2: small-offset continuity probe in (x, p)
    eps = 1e-6
    lip_guess = 0.0
    worst = 0.0
    arg = (0.0, 0.0, 0.0)
    for t in plan.ts[:: max(1, len(plan.ts) // 4)]:
        for x, p in zip(plan.xs[:40], plan.ps[:40]):
            base = float(model.H(t, x, p))
            stepped = float(model.H(t, x + eps, p + eps))
            jump = abs(stepped - base)
            lip_guess = max(lip_guess, jump / (2 * eps))
            if jump > worst:
                worst = jump
                arg = (t, x, p)
    h2_tol = max(1e-3, 10.0 * lip_guess * eps)
    reports.append(CheckReport("H2", worst <= h2_tol, max(0.0, worst - h2_tol),
                               arg, empirical_constant=lip_guess, tolerance=h2_tol,
                               notes="finite-offset continuity probe"))

    # H3: midpoint convexity in p
    worst = -INF
    arg = (0.0, 0.0, 0.0, 0.0)
    for t in plan.ts[:: max(1, len(plan.ts) // 4)]:
        for x in plan.xs[:30]:
            for p, q in plan.pairs_pq[:60]:
                lhs = float(model.H(t, x, 0.5 * (p + q)))
                rhs = 0.5 * (float(model.H(t, x, p)) + float(model.H(t, x, q)))
                gap = lhs - rhs
                if gap > worst:
                    worst = gap
                    arg = (t, x, p, q)
    reports.append(CheckReport("H3", worst <= tol, max(0.0, worst), arg,
                               tolerance=tol))

    # H4: |H(t,x,p) - H(t,x,q)| <= c(t)(1+|x|)|p-q|
    worst = -INF
    emp = 0.0
    arg = (0.0, 0.0, 0.0, 0.0)
    for t in plan.ts[:: max(1, len(plan.ts) // 4)]:
        c_t = float(model.c(t))
        for x in plan.xs[:30]:
            bound = c_t * (1.0 + abs(x))
            for p, q in plan.pairs_pq[:60]:
                if p == q:
                    continue
                ratio = abs(float(model.H(t, x, p)) - float(model.H(t, x, q))) / abs(p - q)
                emp = max(emp, ratio / (1.0 + abs(x)))
                gap = ratio - bound
                if gap > worst:
                    worst = gap
                    arg = (t, x, p, q)
    reports.append(CheckReport("H4", worst <= tol, max(0.0, worst), arg,
                               empirical_constant=emp, tolerance=tol))
    return reports


def check_HLC(model: HamiltonianModel, R: float, plan: SamplePlan,
              tol: float = 1e-9) -> CheckReport:
    """Local Lipschitz audit |H(t,x,p)-H(t,y,p)| <= k_R(t)(1+|p|)|x-y| on B_R."""
    worst = -INF
    emp = 0.0
    arg = (0.0, 0.0, 0.0, 0.0)
    for t in plan.ts:
        k_t = float(model.k_R(t, R))
        for x, y in plan.pairs_xy:
            if abs(x) > R or abs(y) > R or x == y:
                continue
            for p in plan.ps[:40]:
                ratio = abs(float(model.H(t, x, p)) - float(model.H(t, y, p))) \
                    / ((1.0 + abs(p)) * abs(x - y))
                emp = max(emp, ratio)
                gap = ratio - k_t
                if gap > worst:
                    worst = gap
                    arg = (t, x, y, p)
    return CheckReport("HLC", worst <= tol, max(0.0, worst), arg,
                       empirical_constant=emp, tolerance=tol)


def _min_L_near(Lmodel: LagrangianModel, t, y, v, delta, n_grid=41):
    """min of L(t, y, .) over the closed ball |u - v| <= delta, by grid scan
    plus one golden-section refinement."""
    lo, hi = Lmodel.dom(t, y)
    a = max(lo, v - delta)
    b = min(hi, v + delta)
    if a > b:
        return INF, v
    if Lmodel.open_dom and hi > lo:
        width = hi - lo
        a = max(a, lo + 2.0 ** -40 * width)
        b = min(b, hi - 2.0 ** -40 * width)
    us = np.linspace(a, b, n_grid)
    vals = np.asarray(Lmodel.L(t, y, us), dtype=np.float64)
    i = int(np.argmin(vals))
    best, ubest = float(vals[i]), float(us[i])
    # golden refinement inside the bracketing cells
    glo = us[max(0, i - 1)]
    ghi = us[min(n_grid - 1, i + 1)]
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    c = ghi - gr * (ghi - glo)
    d = glo + gr * (ghi - glo)
    fc = float(Lmodel.L(t, y, c))
    fd = float(Lmodel.L(t, y, d))
    for _ in range(40):
        if fc <= fd:
            ghi, d, fd = d, c, fc
            c = ghi - gr * (ghi - glo)
            fc = float(Lmodel.L(t, y, c))
        else:
            glo, c, fc = c, d, fd
            d = glo + gr * (ghi - glo)
            fd = float(Lmodel.L(t, y, d))
    for u, val in ((c, fc), (d, fd)):
        if val < best:
            best, ubest = val, u
    return best, ubest


def check_LLC_ELC(Lmodel: LagrangianModel, R: float, k_R: Callable,
                  plan: SamplePlan, tol: float = 1e-6,
                  eta_offsets=(0.0, 1.0)) -> list:
    """Domain-tracking Lipschitz audit of the Lagrangian and its epigraph.

    For samples v in dom L(t,x,.), search u with |u - v| <= k_R(t)|y - x|
    minimizing L(t,y,u); the slack min_u L(t,y,u) - L(t,x,v) - k_R|y-x|
    must be <= 0.  The epigraph variant repeats the search against levels
    eta >= L(t,x,v).
    """
    worst_llc = -INF
    arg_llc = (0.0, 0.0, 0.0, 0.0)
    worst_elc = -INF
    arg_elc = (0.0, 0.0, 0.0, 0.0, 0.0)
    for t in plan.ts[:: max(1, len(plan.ts) // 3)]:
        k_t = float(k_R(t, R))
        for x, y in plan.pairs_xy[:60]:
            if abs(x) > R or abs(y) > R:
                continue
            delta = k_t * abs(y - x)
            lo, hi = Lmodel.dom(t, x)
            if lo > hi:
                continue
            vs = np.linspace(lo, hi, 9)
            if Lmodel.open_dom and hi > lo:
                width = hi - lo
                vs = np.clip(vs, lo + 2.0 ** -40 * width, hi - 2.0 ** -40 * width)
            for v in vs:
                Lxv = float(Lmodel.L(t, x, float(v)))
                if not np.isfinite(Lxv):
                    continue
                mn, _ = _min_L_near(Lmodel, t, y, float(v), delta)
                slack = mn - Lxv - k_t * abs(y - x)
                if slack > worst_llc:
                    worst_llc = slack
                    arg_llc = (t, x, y, float(v))
                for off in eta_offsets:
                    eslack = mn - (Lxv + off) - k_t * abs(y - x)
                    if eslack > worst_elc:
                        worst_elc = eslack
                        arg_elc = (t, x, y, float(v), Lxv + off)
    return [
        CheckReport("LLC", worst_llc <= tol, max(0.0, worst_llc), arg_llc,
                    tolerance=tol),
        CheckReport("ELC", worst_elc <= tol, max(0.0, worst_elc), arg_elc,
                    tolerance=tol),
    ]


def empirical_k_LLC(Lmodel: LagrangianModel, R: float, plan: SamplePlan,
                    k_hi: float = 8.0, tol: float = 1e-6, iters: int = 40) -> float:
    """Smallest constant making the domain-tracking audit pass (bisection;
    feasibility is monotone in k)."""

    def passes(k):
        reps = check_LLC_ELC(Lmodel, R, _const(k), plan, tol=tol,
                             eta_offsets=(0.0,))
        return reps[0].passed

    lo, hi = 0.0, k_hi
    if passes(lo):
        return 0.0
    if not passes(hi):
        return INF
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


BLC_FILTRATION_STEPS = 8
BLC_THRESHOLD = 1e6


def check_BLC(Lmodel: LagrangianModel, plan: SamplePlan,
              threshold: float = BLC_THRESHOLD,
              steps: int = BLC_FILTRATION_STEPS, tol: float = 1e-9) -> CheckReport:
    """Bounded-above audit of L on its domain.

    With a declared bound lambda: verify L <= lambda on sampled domains and
    report lambda's empirical x-Lipschitz constant.  Without one: evaluate L
    along the boundary filtration v_k = (1 - 10^-k) * boundary and flag
    UNBOUNDED when the estimates exceed the threshold monotonically.
    """
    if Lmodel.lam is not None:
        worst = -INF
        arg = (0.0, 0.0, 0.0)
        lam_lip = 0.0
        for t in plan.ts[:: max(1, len(plan.ts) // 3)]:
            lam_prev = None
            for x in np.sort(plan.xs[:60]):
                lam_x = float(Lmodel.lam(t, x))
                if lam_prev is not None and x != lam_prev[0]:
                    lam_lip = max(lam_lip, abs(lam_x - lam_prev[1]) / abs(x - lam_prev[0]))
                lam_prev = (x, lam_x)
                lo, hi = Lmodel.dom(t, x)
                vs = np.linspace(lo, hi, 17)
                vals = np.asarray(Lmodel.L(t, x, vs), dtype=np.float64)
                fin = np.isfinite(vals)
                if not np.any(fin):
                    continue
                gap = float(np.max(vals[fin]) - lam_x)
                if gap > worst:
                    worst = gap
                    arg = (t, x, float(vs[fin][int(np.argmax(vals[fin]))]))
        return CheckReport("BLC", worst <= tol, max(0.0, worst), arg,
                           empirical_constant=lam_lip, tolerance=tol,
                           notes="declared bound verified; empirical_constant "
                                 "is the bound's x-Lipschitz rate")

    worst = -INF
    arg = (0.0, 0.0, 0.0)
    unbounded = False
    for t in plan.ts[:: max(1, len(plan.ts) // 3)]:
        for x in plan.xs[:40]:
            lo, hi = Lmodel.dom(t, x)
            if hi <= lo:
                continue
            estimates = []
            for k in range(1, steps + 1):
                frac = 1.0 - 10.0 ** -k
                vals = [float(Lmodel.L(t, x, frac * hi)),
                        float(Lmodel.L(t, x, frac * lo))]
                vals = [v for v in vals if np.isfinite(v)]
                if vals:
                    estimates.append(max(vals))
            if not estimates:
                continue
            top = max(estimates)
            if top > worst:
                worst = top
                arg = (t, x, (1.0 - 10.0 ** -len(estimates)) * hi)
            increasing = all(b >= a - 1e-12 for a, b in zip(estimates, estimates[1:]))
            if increasing and estimates[-1] > threshold:
                unbounded = True
    status = "UNBOUNDED" if unbounded else "BOUNDED"
    return CheckReport("BLC", not unbounded, worst if unbounded else 0.0, arg,
                       empirical_constant=worst, tolerance=threshold,
                       notes=f"no declared bound; boundary filtration says {status}")


# ============================================================
# cross-conjugacy between the stored H and L
# ============================================================

def cross_conjugacy_gap(entry: ExampleCatalogEntry, t: float, x: float,
                        h: float = 1e-3) -> dict:
    """Both grid-conjugation directions against the stored closed forms.

    H -> L is compared at interior domain nodes (entry.interior_fraction of
    the radius); L -> H on the growth-padded dual window.
    """
    Hm = entry.hamiltonian
    Lm = entry.lagrangian
    P = float(entry.p_window(x))
    n_p = max(3, int(round(2 * P / h)) + 1)
    ps = np.linspace(-P, P, n_p)
    Hvals = np.asarray(Hm.H(t, x, ps), dtype=np.float64)
    Hg = GridFunction.from_values(-P, ps[1] - ps[0], Hvals)

    lo, hi = Lm.dom(t, x)
    mid = 0.5 * (lo + hi)
    rad = 0.5 * (hi - lo)
    gap_HL = 0.0
    if rad > 0:
        frac = entry.interior_fraction
        vs = np.linspace(mid - frac * rad, mid + frac * rad, 201)
        Lgrid = _kernels.conjugate_max(ps, Hvals, vs)
        Ltrue = np.asarray(Lm.L(t, x, vs), dtype=np.float64)
        gap_HL = float(np.max(np.abs(Lgrid - Ltrue)))
    else:
        # singleton domain: the conjugate of H must be L(mid) at mid
        Lgrid = _kernels.conjugate_max(ps, Hvals, np.array([mid]))
        gap_HL = float(abs(Lgrid[0] - float(Lm.L(t, x, mid))))

    c_t = float(Hm.c(t))
    pr = 1.2 * c_t * (1.0 + abs(x))
    ps2 = np.linspace(-pr, pr, 201)
    if rad > 0:
        n_v = max(3, int(round(2 * rad / h)) + 1)
        vs2 = np.linspace(lo, hi, n_v)
        if Lm.open_dom:
            width = hi - lo
            vs2 = np.clip(vs2, lo + 2.0 ** -40 * width, hi - 2.0 ** -40 * width)
    else:
        vs2 = np.array([mid])
    Lvals = np.asarray(Lm.L(t, x, vs2), dtype=np.float64)
    Hgrid = _kernels.conjugate_max(vs2, Lvals, ps2)
    Htrue = np.asarray(Hm.H(t, x, ps2), dtype=np.float64)
    gap_LH = float(np.max(np.abs(Hgrid - Htrue)))
    return {"H_to_L": gap_HL, "L_to_H": gap_LH}


# ============================================================
# grid-backed user models (file interface; sampled data, not code)
# ============================================================

def load_model_json(path) -> ExampleCatalogEntry:
    """Build a model pair from a sampled-grid JSON file.

    Schema: t_nodes, x_nodes, p_nodes (uniform), H nested [t][x][p], scalar c
    and k_R, optional lambda (scalar or nested [t][x]).  H is interpolated
    multilinearly; L is the on-demand grid conjugate with the growth-ball
    domain guard.
    """
    with open(path) as fh:
        spec = json.load(fh)
    tn = np.asarray(spec["t_nodes"], dtype=np.float64)
    xn = np.asarray(spec["x_nodes"], dtype=np.float64)
    pn = np.asarray(spec["p_nodes"], dtype=np.float64)
    Hv = np.asarray(spec["H"], dtype=np.float64)
    if Hv.shape != (tn.size, xn.size, pn.size):
        raise ValueError("H grid shape mismatch")
    c_val = float(spec.get("c", 1.0))
    k_val = float(spec.get("k_R", 1.0))
    lam_spec = spec.get("lambda")
    name = str(spec.get("name", "user-model"))
    T = float(tn[-1])

    def interp_H(t, x, p):
        p_arr = np.atleast_1d(np.asarray(p, dtype=np.float64))
        it = min(max(np.searchsorted(tn, t) - 1, 0), max(tn.size - 2, 0))
        ix = min(max(np.searchsorted(xn, x) - 1, 0), max(xn.size - 2, 0))
        wt = 0.0 if tn.size == 1 else np.clip((t - tn[it]) / (tn[it + 1] - tn[it]), 0, 1)
        wx = 0.0 if xn.size == 1 else np.clip((x - xn[ix]) / (xn[ix + 1] - xn[ix]), 0, 1)
        slab = (1 - wt) * ((1 - wx) * Hv[it, ix] + wx * Hv[it, min(ix + 1, xn.size - 1)])
        if tn.size > 1:
            slab = slab + wt * ((1 - wx) * Hv[min(it + 1, tn.size - 1), ix]
                                + wx * Hv[min(it + 1, tn.size - 1), min(ix + 1, xn.size - 1)])
        out = np.interp(p_arr, pn, slab)
        return out if np.ndim(p) else float(out[0])

    def H(t, x, p):
        return interp_H(t, x, p)

    def dom(t, x):
        r = c_val * (1.0 + abs(x))
        return -r, r

    def L(t, x, v):
        v_arr = np.atleast_1d(np.asarray(v, dtype=np.float64))
        Hrow = np.asarray(interp_H(t, x, pn), dtype=np.float64)
        vals = _kernels.conjugate_max(pn, Hrow, v_arr)
        r = c_val * (1.0 + abs(x))
        vals = np.where(np.abs(v_arr) <= r * (1 + 1e-9), vals, INF)
        return vals if np.ndim(v) else float(vals[0])

    lam = None
    if lam_spec is not None:
        if np.isscalar(lam_spec):
            lam = _const(float(lam_spec))
        else:
            lam_grid = np.asarray(lam_spec, dtype=np.float64)

            def lam(t, x, _g=lam_grid):
                it = min(max(np.searchsorted(tn, t) - 1, 0), max(tn.size - 2, 0))
                return float(np.interp(x, xn, _g[it]))

    Hmodel = HamiltonianModel(name, 1, H, _const(c_val), lambda t, R: k_val, T=T)
    Lmodel = LagrangianModel(name, 1, L, dom, lam=lam, provenance="grid-conjugate")
    return ExampleCatalogEntry(
        key=name, description=f"grid-backed model from {path}",
        hamiltonian=Hmodel, lagrangian=Lmodel,
        bounded_above=lam is not None,
        p_window=lambda x: float(max(abs(pn[0]), abs(pn[-1]))),
        interior_fraction=0.9,
    )
