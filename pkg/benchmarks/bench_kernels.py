"""Compare the compiled kernel backend against the pure-numpy fallback.

Runs each workload in a subprocess so the backend choice (made at import
time from HAMREP_DISABLE_NUMBA) is clean, then prints a side-by-side
table.  Workloads go through the public APIs so the numbers reflect the
shipped call paths, not micro-kernels.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads():
    import numpy as np

    from hamrep import bolza as bz
    from hamrep import conjugate as cj
    from hamrep import models
    from hamrep import representation as rp

    entry = models.catalog()["EX2"]

    def conjugate_sweep():
        ps = np.linspace(-8.0, 8.0, 4001)
        vals = np.asarray(entry.hamiltonian.H(0.0, 0.5, ps), dtype=np.float64)
        g = cj.GridFunction.from_values(-8.0, ps[1] - ps[0], vals)
        out = cj.conjugate_grid(g, -0.9, 0.9, 2001)
        return float(np.sum(out.values[np.isfinite(out.values)]))

    rep = rp.Representation(entry)
    cloud = rep.control_cloud(0.0, 0.5, 1024, seed=3)

    def construct_batch():
        trace = rep.construct(0.0, 0.5, cloud)
        return float(np.sum(trace.e))

    spec = bz.BolzaSpec.pinned(0.0, n_t=50, n_x=201)

    def dp_sweep():
        return float(bz.solve_variational(spec, entry).value)

    return [("conjugate 4001x2001", conjugate_sweep),
            ("construct 1024 controls", construct_batch),
            ("variational DP 50x201", dp_sweep)]


def run_worker(repeat):
    from hamrep import _kernels

    _kernels.warmup()
    results = {}
    for name, fn in _workloads():
        fn()  # warm caches and jit outside the timed region
        best = float("inf")
        check = None
        for _ in range(repeat):
            t0 = time.perf_counter()
            check = fn()
            best = min(best, time.perf_counter() - t0)
        results[name] = {"seconds": best, "check": check}
    json.dump({"backend": _kernels.backend_name(), "results": results},
              sys.stdout)


def spawn(disable_numba, repeat):
    env = dict(os.environ)
    env["HAMREP_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker",
         "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3,
                    help="timed repetitions per workload (best-of)")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.worker:
        run_worker(args.repeat)
        return

    fast = spawn(False, args.repeat)
    slow = spawn(True, args.repeat)
    print(f"backends: {fast['backend']} vs {slow['backend']}")
    print(f"{'workload':<28}{fast['backend']:>12}{slow['backend']:>12}"
          f"{'speedup':>10}")
    for name in fast["results"]:
        a = fast["results"][name]
        b = slow["results"][name]
        if a["check"] is not None and b["check"] is not None:
            drift = abs(a["check"] - b["check"])
            scale = max(1.0, abs(a["check"]))
            if drift > 1e-9 * scale:
                print(f"  WARNING {name}: backend results differ by {drift:.3e}")
        ratio = b["seconds"] / a["seconds"] if a["seconds"] > 0 else float("inf")
        print(f"{name:<28}{a['seconds']:>11.3f}s{b['seconds']:>11.3f}s"
              f"{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
