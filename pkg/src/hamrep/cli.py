"""Batch command-line front end for the representation laboratory.

Subcommands drive the library modules and leave plot-ready CSV and JSON
artifacts in the output directory; nothing is rendered and nothing is
interactive.  Exit codes are stable: 0 all checks pass, 2 a structural
condition is violated (reason line on stdout, e.g. ``reason=BLC_VIOLATED``),
3 a numerical audit fails, 64 usage or configuration error.

A flat key-value config file (``key = value`` per line, ``#`` comments,
keys mirroring the long flags) can replace or seed the flags; explicit
flags win.  All sampling is seeded, so identical configs give
byte-identical outputs.  Set HAMREP_THREADS to cap compiled-kernel
threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import bolza, models, stability
from .representation import BLCRequiredError, Representation

EXIT_OK = 0
EXIT_CONDITION = 2
EXIT_AUDIT = 3
EXIT_USAGE = 64

DEFAULT_OUT = "hamrep-out"

# config keys mirror the long flags; values are the parsers applied to
# the raw strings
CONFIG_KEYS = {
    "example": str,
    "model-file": str,
    "out": str,
    "seed": int,
    "Nt": int,
    "Nx": int,
    "check": str,
    "rule": str,
    "imax": int,
    "tol-sup": float,
    "tol-sandwich": float,
    "tol-gap": float,
    "tol-stability": float,
}

_KEY_TO_FIELD = {
    "example": "example",
    "model-file": "model_file",
    "out": "out",
    "seed": "seed",
    "Nt": "n_t",
    "Nx": "n_x",
    "check": "check",
    "rule": "rule",
    "imax": "imax",
    "tol-sup": "tol_sup",
    "tol-sandwich": "tol_sandwich",
    "tol-gap": "tol_gap",
    "tol-stability": "tol_stability",
}

CHECK_NAMES = ("all", "H1", "H2", "H3", "H4", "HLC", "LLC_ELC", "BLC")


class UsageError(Exception):
    """Bad flags, config keys, or identifiers; mapped to exit 64."""


@dataclass(frozen=True)
class RunConfig:
    """One resolved run: subcommand plus every knob it may read.

    Defaults: out 'hamrep-out', seed 0, Nt 50, Nx 201, check 'all',
    rule 'shift', imax 64, tol-sup 5e-2, tol-sandwich 1e-6, tol-gap
    None (3(h_t+h_x) at run time), tol-stability 1e-2.
    """

    command: str
    example: Optional[str] = None
    model_file: Optional[str] = None
    out: str = DEFAULT_OUT
    seed: int = 0
    n_t: int = 50
    n_x: int = 201
    check: str = "all"
    rule: str = "shift"
    imax: int = 64
    tol_sup: float = 5e-2
    tol_sandwich: float = 1e-6
    tol_gap: Optional[float] = None
    tol_stability: float = 1e-2


# ============================================================
# config assembly
# ============================================================

def load_config_file(path: str) -> dict:
    """Flat key-value text into a flag-keyed dict; unknown keys rejected."""
    got = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    for ln, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{ln}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{ln}: unknown config key {key!r}")
        try:
            got[key] = CONFIG_KEYS[key](val)
        except ValueError:
            raise UsageError(f"{path}:{ln}: bad value for {key}: {val!r}")
    return got


def _resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Defaults, then config file, then explicit flags."""
    merged = {}
    if getattr(ns, "config", None):
        for key, val in load_config_file(ns.config).items():
            merged[_KEY_TO_FIELD[key]] = val
    for field in _KEY_TO_FIELD.values():
        flag_val = getattr(ns, field, None)
        if flag_val is not None:
            merged[field] = flag_val
    cfg = RunConfig(command=ns.command, **merged)
    if cfg.command != "catalog":
        if (cfg.example is None) == (cfg.model_file is None):
            raise UsageError("give exactly one of --example or --model-file")
    if cfg.check not in CHECK_NAMES:
        raise UsageError(f"unknown check {cfg.check!r}; have {CHECK_NAMES}")
    if cfg.rule not in stability.FAMILY_KINDS:
        raise UsageError(f"unknown rule {cfg.rule!r}; "
                         f"have {tuple(stability.FAMILY_KINDS)}")
    if cfg.imax < 4:
        raise UsageError("imax must be at least 4")
    if cfg.n_t < 1 or cfg.n_x < 2:
        raise UsageError("Nt must be >= 1 and Nx >= 2")
    if cfg.seed < 0:
        raise UsageError("seed must be nonnegative")
    return cfg


def _load_entry(cfg: RunConfig) -> models.ExampleCatalogEntry:
    if cfg.example is not None:
        cat = models.catalog()
        if cfg.example not in cat:
            raise UsageError(f"unknown example {cfg.example!r}; "
                             f"have {sorted(cat)}")
        return cat[cfg.example]
    try:
        return models.load_model_json(cfg.model_file)
    except OSError as exc:
        raise UsageError(f"cannot read model file: {exc}")
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad model file: {exc}")


# ============================================================
# atomic artifact writes
# ============================================================

def _atomic_write(path: str, writer: Callable[[str], None]) -> None:
    tmp = path + ".tmp"
    writer(tmp)
    os.replace(tmp, path)


def _write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def put(tmp):
        with open(tmp, "w") as fh:
            fh.write(text)

    _atomic_write(path, put)


def _say(key: str, value) -> None:
    print(f"{key}={value}")


# ============================================================
# represent
# ============================================================

def _growth_slack(rep: Representation, t: float, x: float,
                  n: int, seed: int) -> float:
    """Worst excess of selected speeds over the growth window."""
    cloud = rep.control_cloud(t, x, n, seed)
    trace = rep.construct(t, x, cloud)
    window = float(rep.entry.hamiltonian.c(t)) * (1.0 + abs(x))
    return float(np.max(np.abs(trace.e[:, 0])) - window)


def cmd_represent(cfg: RunConfig) -> int:
    entry = _load_entry(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    audit_path = os.path.join(cfg.out, "audit.json")
    try:
        rep = Representation(entry)
    except BLCRequiredError as exc:
        _write_json(audit_path, {"example": entry.key, "passed": False,
                                 "reason": "BLC_VIOLATED",
                                 "detail": str(exc)})
        _say("reason", "BLC_VIOLATED")
        return EXIT_CONDITION

    T = float(entry.hamiltonian.T)
    ts = [0.0, 0.5 * T, T]
    xs = [-1.0, -0.5, 0.0, 0.5, 1.0]
    sup_min, sup_max = np.inf, -np.inf
    slack_min, recovery_max = np.inf, -np.inf
    coverage_min = np.inf
    growth_max = -np.inf
    for t in ts:
        for x in xs:
            sup = rep.verify_sup_formula(t, x, n_cloud=1024, seed=cfg.seed)
            sand = rep.verify_sandwich(t, x, n_cloud=1024, seed=cfg.seed)
            sup_min = min(sup_min, sup.residual_min)
            sup_max = max(sup_max, sup.residual_max)
            slack_min = min(slack_min, sand.membership_min_slack)
            recovery_max = max(recovery_max, sand.graph_recovery_error)
            coverage_min = min(coverage_min, sand.velocity_coverage)
            growth_max = max(growth_max,
                             _growth_slack(rep, t, x, 512, cfg.seed))
    lip = rep.audit_lipschitz(0.0, 1.0, seed=cfg.seed)

    trace = rep.construct(0.0, 0.5, rep.control_cloud(0.0, 0.5, 256,
                                                      cfg.seed))
    from .representation import save_trace_csv
    _atomic_write(os.path.join(cfg.out, "representation_trace.csv"),
                  lambda tmp: save_trace_csv(trace, tmp))

    passed = (sup_min >= -1e-9 and sup_max <= cfg.tol_sup
              and slack_min >= -cfg.tol_sandwich
              and recovery_max <= cfg.tol_sandwich
              and coverage_min >= 1.0 - 1e-12
              and lip.passed and growth_max <= 1e-9)
    _write_json(audit_path, {
        "example": entry.key,
        "passed": bool(passed),
        "reason": "OK" if passed else "AUDIT_FAILED",
        "sup_formula": {"residual_min": sup_min, "residual_max": sup_max,
                        "tolerance": cfg.tol_sup},
        "sandwich": {"membership_min_slack": slack_min,
                     "graph_recovery_error": recovery_max,
                     "velocity_coverage": coverage_min,
                     "tolerance": cfg.tol_sandwich},
        "lipschitz": {"passed": bool(lip.passed), "empirical": lip.empirical,
                      "bound": lip.bound},
        "growth": {"worst_excess": growth_max, "tolerance": 1e-9},
        "mesh": {"ts": ts, "xs": xs},
        "seed": cfg.seed,
    })
    _say("audit", "pass" if passed else "fail")
    _say("sup_residual_max", f"{sup_max:.6g}")
    return EXIT_OK if passed else EXIT_AUDIT


# ============================================================
# verify
# ============================================================

def cmd_verify(cfg: RunConfig) -> int:
    entry = _load_entry(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    plan = models.SamplePlan.default(seed=cfg.seed)
    R = 2.0
    reports = []
    if cfg.check in ("all", "H1", "H2", "H3", "H4"):
        conds = models.check_H1_H4(entry.hamiltonian, plan)
        if cfg.check != "all":
            conds = [r for r in conds if r.condition == cfg.check]
        reports.extend(conds)
    if cfg.check in ("all", "HLC"):
        reports.append(models.check_HLC(entry.hamiltonian, R, plan))
    if cfg.check in ("all", "LLC_ELC"):
        reports.extend(models.check_LLC_ELC(entry.lagrangian, R,
                                            entry.hamiltonian.k_R, plan))
    if cfg.check in ("all", "BLC"):
        reports.append(models.check_BLC(entry.lagrangian, plan))

    text = models.reports_to_json(reports)

    def put(tmp):
        with open(tmp, "w") as fh:
            fh.write(text + "\n")

    _atomic_write(os.path.join(cfg.out, "verify_report.json"), put)
    _atomic_write(os.path.join(cfg.out, "verify_report.csv"),
                  lambda tmp: models.reports_to_csv(reports, tmp))

    failed = [r for r in reports if not r.passed]
    for r in reports:
        emp = "" if r.empirical_constant is None \
            else f" empirical={r.empirical_constant:.6g}"
        _say(r.condition, ("pass" if r.passed else "FAIL") + emp)
    if any(r.condition == "BLC" and not r.passed for r in reports):
        _say("reason", "BLC_VIOLATED")
    return EXIT_OK if not failed else EXIT_CONDITION


# ============================================================
# stability
# ============================================================

def _dyadic_schedule(imax: int) -> tuple:
    sched = []
    i = 1
    while i <= imax:
        sched.append(i)
        i *= 2
    if sched[-1] != imax:
        sched.append(imax)
    return tuple(sched)


def cmd_stability(cfg: RunConfig) -> int:
    entry = _load_entry(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    fam = stability.PerturbationFamily(entry, kind=cfg.rule,
                                       schedule=_dyadic_schedule(cfg.imax))
    points = [(0.0, 0.3, (0.6, 0.0)), (0.5, -0.4, (0.0, 0.5)),
              (float(entry.hamiltonian.T), 1.0, (0.3, -0.3))]
    report = stability.stability_audit_e(fam, points, tol=cfg.tol_stability,
                                         n_graph=65)
    _atomic_write(os.path.join(cfg.out, "stability_deviations.csv"),
                  lambda tmp: stability.save_stability_csv(report, tmp))
    _atomic_write(os.path.join(cfg.out, "stability_report.json"),
                  lambda tmp: stability.save_stability_json(report, tmp))
    _say("rule", report.kind)
    _say("rate_constant", f"{report.rate_constant:.6g}")
    _say("r_squared", f"{report.r_squared:.6g}")
    _say("final_deviation", f"{report.final:.6g}")
    _say("stability", "pass" if report.passed else "fail")
    return EXIT_OK if report.passed else EXIT_AUDIT


# ============================================================
# bolza
# ============================================================

def cmd_bolza(cfg: RunConfig) -> int:
    entry = _load_entry(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    report_path = os.path.join(cfg.out, "bolza_report.json")
    spec = bolza.BolzaSpec.pinned(0.0, n_t=cfg.n_t, n_x=cfg.n_x)
    try:
        rep = Representation(entry, n_graph=65, n_ball=64, n_quad=256)
    except BLCRequiredError as exc:
        _write_json(report_path, {"example": entry.key, "passed": False,
                                  "reason": "BLC_VIOLATED",
                                  "detail": str(exc)})
        _say("reason", "BLC_VIOLATED")
        return EXIT_CONDITION
    sol_v = bolza.solve_variational(spec, entry)
    sol_c = bolza.solve_control(spec, rep, n_cloud=32, seed=cfg.seed)
    floor = bolza.lower_bound_report(spec, entry)

    _atomic_write(os.path.join(cfg.out, "bolza_value.csv"),
                  lambda tmp: bolza.save_value_csv(sol_v.table, tmp))
    if sol_v.feasible:
        _atomic_write(os.path.join(cfg.out, "bolza_arc_variational.csv"),
                      lambda tmp: bolza.save_arc_csv(sol_v, tmp))
    if sol_c.feasible:
        _atomic_write(os.path.join(cfg.out, "bolza_arc_control.csv"),
                      lambda tmp: bolza.save_arc_csv(sol_c, tmp))

    h_t = (spec.t1 - spec.t0) / cfg.n_t
    h_x = 2.0 * floor.radius / (cfg.n_x - 1)
    tol = 3.0 * (h_t + h_x) if cfg.tol_gap is None else cfg.tol_gap
    gap = abs(sol_v.value - sol_c.value)
    feasible = sol_v.feasible and sol_c.feasible
    floor_ok = (sol_v.value >= floor.bound - 1e-9
                and sol_c.value >= floor.bound - 1e-9)
    passed = feasible and gap <= tol and floor_ok
    _write_json(report_path, {
        "example": entry.key,
        "passed": bool(passed),
        "reason": "OK" if passed else
        ("LOWER_BOUND_VIOLATED" if feasible and not floor_ok
         else "AUDIT_FAILED"),
        "min_variational": sol_v.value,
        "min_control": sol_c.value,
        "gap": gap,
        "tolerance": tol,
        "lower_bound": floor.bound,
        "n_t": cfg.n_t,
        "n_x": cfg.n_x,
        "seed": cfg.seed,
    })
    _say("min_variational", f"{sol_v.value:.12g}")
    _say("min_control", f"{sol_c.value:.12g}")
    _say("gap", f"{gap:.6g}")
    _say("tolerance", f"{tol:.6g}")
    if not floor_ok:
        _say("reason", "LOWER_BOUND_VIOLATED")
        return EXIT_CONDITION
    return EXIT_OK if passed else EXIT_AUDIT


# ============================================================
# catalog
# ============================================================

def cmd_catalog(cfg: RunConfig) -> int:
    for key, entry in sorted(models.catalog().items()):
        bound = "bounded" if entry.bounded_above else "unbounded"
        print(f"{key}: {entry.description} [{bound}]")
    return EXIT_OK


# ============================================================
# entry point
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamrep",
        description="Construct and audit compact-control representations "
                    "of convex Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--example", help="catalog entry id")
    common.add_argument("--model-file", dest="model_file",
                        help="sampled-grid model JSON file")
    common.add_argument("--out", help=f"output directory "
                        f"(default {DEFAULT_OUT})")
    common.add_argument("--seed", type=int, help="sampling seed (default 0)")
    common.add_argument("--config",
                        help="flat key-value config file; flags override")

    p = sub.add_parser("represent", parents=[common],
                       help="construct a representation and audit it")
    p.add_argument("--tol-sup", dest="tol_sup", type=float,
                   help="sup-formula residual tolerance")
    p.add_argument("--tol-sandwich", dest="tol_sandwich", type=float,
                   help="membership/recovery tolerance")

    p = sub.add_parser("verify", parents=[common],
                       help="sampled structural-condition checks")
    p.add_argument("--check", choices=CHECK_NAMES,
                   help="which condition to check (default all)")

    p = sub.add_parser("stability", parents=[common],
                       help="perturbation-family convergence audit")
    p.add_argument("--rule", help="family kind: shift, bump, or drift")
    p.add_argument("--imax", type=int,
                   help="largest family index (default 64)")
    p.add_argument("--tol-stability", dest="tol_stability", type=float,
                   help="final-deviation tolerance")

    p = sub.add_parser("bolza", parents=[common],
                       help="discrete variational/control minima comparison")
    p.add_argument("--Nt", dest="n_t", type=int, help="time steps")
    p.add_argument("--Nx", dest="n_x", type=int, help="state nodes")
    p.add_argument("--tol-gap", dest="tol_gap", type=float,
                   help="minima gap tolerance (default 3(h_t+h_x))")

    sub.add_parser("catalog", parents=[common], help="list catalog entries")
    return parser


def _apply_thread_cap() -> None:
    cap = os.environ.get("HAMREP_THREADS")
    if not cap:
        return
    try:
        n = max(1, int(cap))
    except ValueError:
        return
    try:
        import numba
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    except ImportError:
        pass


COMMANDS = {
    "represent": cmd_represent,
    "verify": cmd_verify,
    "stability": cmd_stability,
    "bolza": cmd_bolza,
    "catalog": cmd_catalog,
}


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = _resolve_config(ns)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BLCRequiredError:
        _say("reason", "BLC_VIOLATED")
        return EXIT_CONDITION


if __name__ == "__main__":
    sys.exit(main())
