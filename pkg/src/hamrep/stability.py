"""Perturbation families and convergence audits for the construction.

A family produces models H_i that approach the base uniformly on a
declared compact; the audits measure how fast the constructed control
maps follow.  Three rules are shipped: a constant shift H_i = H + rho/i
(the conjugate shifts down by the same amount, so the bound lambda is
untouched), a compactly supported Lipschitz bump rho max(0, 1-|x|)/i,
and a base-point drift that leaves the model alone and moves the
evaluation point (t, x, a) instead.

Set convergence is probed through distance functions: K_i -> K exactly
when d(z, K_i) -> d(z, K) for every probe point z.  Epi-convergence of
grid functions is checked by the two one-sided inequalities, with the
recovery sequence allowed to move by one grid cell.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import geometry, models
from .conjugate import GridFunction
from .representation import Representation

INF = np.inf

FAMILY_KINDS = ("shift", "bump", "drift")
DEFAULT_SCHEDULE = (1, 2, 4, 8, 16, 32, 64)
DEFAULT_RHO = 0.25
BLOWUP_THRESHOLD = 1e6


# ============================================================
# perturbation families
# ============================================================

@dataclass(frozen=True)
class PerturbationFamily:
    """Indexed models H_i -> H with shared growth data.

    kind "shift": H_i = H + rho/i, L_i = L - rho/i, lambda_i = lambda.
    kind "bump":  H_i = H + rho max(0, 1-|x|)/i, conjugate likewise.
    kind "drift": models fixed; point(i, ...) supplies the moving base
    point (t + dt/i, x + dx/i, a (1 - da/i)).
    """

    base: models.ExampleCatalogEntry
    kind: str = "shift"
    rho: float = DEFAULT_RHO
    schedule: tuple = DEFAULT_SCHEDULE
    drift: tuple = (0.05, 0.1, 0.1)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.rho < 0.0:
            raise ValueError("rho must be nonnegative")
        sched = tuple(int(i) for i in self.schedule)
        if len(sched) < 3 or any(i <= 0 for i in sched):
            raise ValueError("schedule needs >= 3 positive indices")
        if any(b <= a for a, b in zip(sched, sched[1:])):
            raise ValueError("schedule must increase")
        object.__setattr__(self, "schedule", sched)

    def offset(self, i: int, x: float) -> float:
        """Additive Hamiltonian offset of member i at state x."""
        if self.kind == "shift":
            return self.rho / i
        if self.kind == "bump":
            return self.rho * max(0.0, 1.0 - abs(x)) / i
        return 0.0

    def member(self, i: int) -> models.ExampleCatalogEntry:
        if self.kind == "drift" or self.rho == 0.0:
            return self.base
        off = self.offset
        Hm = self.base.hamiltonian
        Lm = self.base.lagrangian
        baseH, baseL, basek = Hm.H, Lm.L, Hm.k_R
        # a p-constant offset leaves dom and the conjugate shape alone
        Hi = lambda t, x, p, _i=i: baseH(t, x, p) + off(_i, x)
        Li = lambda t, x, v, _i=i: baseL(t, x, v) - off(_i, x)
        if self.kind == "bump":
            # |d/dx bump_i| <= rho/i, add it to the declared modulus
            ki = lambda t, R, _i=i: basek(t, R) + self.rho / _i
        else:
            ki = basek
        return replace(
            self.base,
            key=f"{self.base.key}~{self.kind}{i}",
            hamiltonian=replace(Hm, name=f"{Hm.name}~{self.kind}{i}", H=Hi, k_R=ki),
            lagrangian=replace(Lm, name=f"{Lm.name}~{self.kind}{i}", L=Li),
            lipschitz_triple=None,
            graphical_triple=None,
            family=None,
        )

    def point(self, i: int, t: float, x: float, a):
        """Evaluation point for member i (identity unless drifting)."""
        if self.kind != "drift":
            return float(t), float(x), np.asarray(a, dtype=np.float64)
        dt, dx, da = self.drift
        T = self.base.hamiltonian.T
        ti = min(max(t + dt / i, 0.0), T)
        xi = x + dx / i
        ai = np.asarray(a, dtype=np.float64) * (1.0 - da / i)
        return float(ti), float(xi), ai

    def deviation_sup(self, i: int, ts=None, xs=None, ps=None) -> dict:
        """Sup-norms of (H_i - H), (lambda_i - lambda), (c_i - c) on the
        audit compact (defaults [0,1] x [-2,2] x [-3,3])."""
        ts = np.linspace(0.0, self.base.hamiltonian.T, 11) if ts is None else np.asarray(ts)
        xs = np.linspace(-2.0, 2.0, 17) if xs is None else np.asarray(xs)
        ps = np.linspace(-3.0, 3.0, 13) if ps is None else np.asarray(ps)
        ent = self.member(i)
        H0, Hi = self.base.hamiltonian.H, ent.hamiltonian.H
        dH = 0.0
        for t in ts:
            for x in xs:
                dH = max(dH, float(np.max(np.abs(
                    np.asarray(Hi(t, x, ps)) - np.asarray(H0(t, x, ps))))))
        lam0, lami = self.base.lagrangian.lam, ent.lagrangian.lam
        dlam = 0.0
        if lam0 is not None and lami is not None:
            dlam = max(abs(float(lami(t, x)) - float(lam0(t, x)))
                       for t in ts for x in xs)
        dc = max(abs(float(ent.hamiltonian.c(t)) - float(self.base.hamiltonian.c(t)))
                 for t in ts)
        return {"H": dH, "lam": dlam, "c": dc}


def family_condition_reports(fam: PerturbationFamily, R: float = 2.0,
                             plan: Optional[models.SamplePlan] = None) -> list:
    """Structural audits of every scheduled member, merged per condition.

    The Lipschitz audit uses the base modulus plus the family's own
    allowance, so a pass certifies uniform constants across the family.
    """
    plan = models.SamplePlan.default() if plan is None else plan
    merged: dict = {}
    for i in fam.schedule:
        ent = fam.member(i)
        reports = list(models.check_H1_H4(ent.hamiltonian, plan))
        reports.append(models.check_HLC(ent.hamiltonian, R, plan))
        for rep in reports:
            prev = merged.get(rep.condition)
            merged[rep.condition] = rep if prev is None else models.merge_reports(prev, rep)
    return list(merged.values())


# ============================================================
# sampled set limits
# ============================================================

@dataclass(frozen=True)
class SetSequenceProbe:
    bodies: tuple            # K_i in schedule order
    target: geometry.ConvexBody
    points: np.ndarray       # probe points, one per row

    def __post_init__(self):
        if len(self.bodies) < 3:
            raise ValueError("need >= 3 bodies to probe a limit")
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if pts.shape[1] != self.target.m:
            raise ValueError("probe points and target dimension differ")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class SetLimitReport:
    passed: bool
    deviations: np.ndarray    # |d(z, K_i) - d(z, K)| per (index, probe)
    worst_last: float
    tolerance: float


def _distances(body: geometry.ConvexBody, pts: np.ndarray) -> np.ndarray:
    out = np.empty(pts.shape[0])
    for j, z in enumerate(pts):
        out[j] = float(geometry.project(z, body)[1])
    return out


def set_limit_check(probe: SetSequenceProbe, tol: float = 1e-2,
                    slack: float = 0.1) -> SetLimitReport:
    """Distance-function surrogate for set convergence K_i -> K."""
    d_target = _distances(probe.target, probe.points)
    dev = np.empty((len(probe.bodies), probe.points.shape[0]))
    for k, body in enumerate(probe.bodies):
        dev[k] = np.abs(_distances(body, probe.points) - d_target)
    worst = dev.max(axis=1)
    shrinking = bool(np.all(worst[1:] <= worst[:-1] * (1.0 + slack) + 1e-12))
    passed = shrinking and worst[-1] <= tol
    return SetLimitReport(passed, dev, float(worst[-1]), tol)


# ============================================================
# convergence of the constructed maps
# ============================================================

@dataclass(frozen=True)
class StabilityReport:
    passed: bool
    kind: str
    schedule: tuple
    deviations: np.ndarray    # max-over-points |e_i - e| per index
    rate_constant: float      # C in the fitted deviation ~ C/i
    r_squared: float
    final: float
    tolerance: float


def fit_inverse_rate(schedule, deviations) -> tuple:
    """Least-squares C for deviation ~ C/i, with the usual R^2 against
    the mean; a flat zero sequence fits perfectly by convention."""
    inv = 1.0 / np.asarray(schedule, dtype=np.float64)
    dev = np.asarray(deviations, dtype=np.float64)
    denom = float(np.dot(inv, inv))
    C = float(np.dot(dev, inv) / denom) if denom > 0.0 else 0.0
    ss_res = float(np.sum((dev - C * inv) ** 2))
    ss_tot = float(np.sum((dev - dev.mean()) ** 2))
    if ss_tot == 0.0:
        # no variance to explain: perfect only if the fit is also exact
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return C, r2


def stability_audit_e(fam: PerturbationFamily, points: Sequence,
                      tol: float = 1e-2, slack: float = 0.1,
                      n_graph: Optional[int] = None) -> StabilityReport:
    """Track max_point |e_i - e| along the schedule and fit C/i.

    Construction parameters are identical across indices; the only
    variation is the family's own.
    """
    kw = {} if n_graph is None else {"n_graph": int(n_graph)}
    rep0 = Representation(fam.base, **kw)
    base_e = [rep0.e(t, x, np.asarray(a, dtype=np.float64)) for t, x, a in points]
    devs = np.empty(len(fam.schedule))
    for k, i in enumerate(fam.schedule):
        ent = fam.member(i)
        rep_i = rep0 if ent is fam.base else Representation(ent, **kw)
        worst = 0.0
        for (t, x, a), e0 in zip(points, base_e):
            ti, xi, ai = fam.point(i, t, x, a)
            ei = rep_i.e(ti, xi, ai)
            worst = max(worst, float(np.max(np.abs(ei - e0))))
        devs[k] = worst
    C, r2 = fit_inverse_rate(fam.schedule, devs)
    nonincreasing = bool(np.all(devs[1:] <= devs[:-1] * (1.0 + slack) + 1e-12))
    passed = nonincreasing and devs[-1] <= tol
    return StabilityReport(passed, fam.kind, fam.schedule, devs, C, r2,
                           float(devs[-1]), tol)


# ============================================================
# epi-convergence of grid functions
# ============================================================

@dataclass(frozen=True)
class EpiConvergenceReport:
    passed: bool
    lower_gap: float       # worst F(v) - liminf_i F_i(v)
    upper_gap: float       # worst recovery excess over F(v)
    tolerance: float
    tail: int


def epi_convergence_check(fs: Sequence[GridFunction], f: GridFunction,
                          tol: float = 5e-2, tail: int = 3,
                          blowup: float = BLOWUP_THRESHOLD) -> EpiConvergenceReport:
    """Two-sided sampled epi-convergence check on a common grid.

    Lower: liminf (estimated as the min over the last `tail` members)
    must not undercut f at any node.  Upper: each finite node must be
    recovered within one grid cell by the last member.  Nodes where f
    is +inf demand the tail exceed the blowup threshold instead.
    """
    if len(fs) < tail:
        raise ValueError(f"need >= {tail} functions for the tail estimate")
    for g in fs:
        if g.lo != f.lo or g.h != f.h or g.values.shape != f.values.shape:
            raise ValueError("grid mismatch in epi-convergence check")
    stack = np.stack([g.values for g in fs[-tail:]])
    liminf_est = stack.min(axis=0)
    F = f.values
    finite = np.isfinite(F)
    lower_gap = -INF
    if np.any(finite):
        lower_gap = float(np.max(F[finite] - liminf_est[finite]))
    if np.any(~finite):
        diverged = liminf_est[~finite] >= blowup
        if not bool(np.all(diverged)):
            lower_gap = INF
    last = fs[-1].values
    upper_gap = -INF
    idx = np.flatnonzero(finite)
    for j in idx:
        lo = max(0, j - 1)
        hi = min(last.shape[0], j + 2)
        rec = float(np.min(last[lo:hi]))
        upper_gap = max(upper_gap, rec - F[j])
    passed = lower_gap <= tol and upper_gap <= tol
    return EpiConvergenceReport(passed, lower_gap, upper_gap, tol, tail)


# ============================================================
# report io
# ============================================================

def save_stability_csv(report: StabilityReport, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "deviation"])
        for i, d in zip(report.schedule, report.deviations):
            w.writerow([i, repr(float(d))])


def stability_report_json_dict(report: StabilityReport) -> dict:
    return {
        "kind": report.kind,
        "schedule": list(report.schedule),
        "deviations": [float(d) for d in report.deviations],
        "rate_constant": float(report.rate_constant),
        "r_squared": float(report.r_squared),
        "final": float(report.final),
        "tolerance": float(report.tolerance),
        "passed": bool(report.passed),
    }


def save_stability_json(report: StabilityReport, path):
    with open(path, "w") as fh:
        json.dump(stability_report_json_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_set_limit_csv(report: SetLimitReport, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "worst_deviation"])
        for k, row in enumerate(report.deviations):
            w.writerow([k, repr(float(np.max(row)))])
