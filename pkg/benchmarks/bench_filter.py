#!/usr/bin/env python3
"""Benchmark the hot safety-filter path: numba JIT vs pure-NumPy fallback.

Runs itself twice in subprocesses (the JIT choice is fixed at import time via
CBFTELEOP_NO_NUMBA) and prints a comparison table:

    python benchmarks/bench_filter.py
"""

import argparse
import json
import os
import subprocess
import sys
import time


def measure(ticks: int) -> dict:
    import numpy as np

    from cbfteleop import RunSpec, UAVState, load_world, world_to_barriers
    from cbfteleop.accel import USING_NUMBA
    from cbfteleop.pilots import PilotSpec
    from cbfteleop.runner import run_trial
    from cbfteleop.safety_filter import FilterConfig, filter_input

    world = load_world("default")
    barriers = world_to_barriers(world)
    cfg = FilterConfig()
    st = UAVState(np.array([0.8, 1.0]), np.array([-1.5, 0.3]))
    u_ref = np.array([-8.0, 2.0])

    t0 = time.perf_counter()
    filter_input(st, u_ref, barriers, cfg)
    warmup = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(ticks):
        filter_input(st, u_ref, barriers, cfg)
    per_call_us = (time.perf_counter() - t0) / ticks * 1e6

    spec = RunSpec(
        condition="CBF",
        mode="override",
        pilot=PilotSpec(kind="charger"),
        timeout=20.0,
    )
    t0 = time.perf_counter()
    log = run_trial(spec, world, barriers, 0)
    trial_s = time.perf_counter() - t0

    return {
        "using_numba": USING_NUMBA,
        "warmup_s": warmup,
        "filter_us": per_call_us,
        "trial_ticks": len(log.samples),
        "trial_s": trial_s,
        "tick_us": trial_s / max(1, len(log.samples)) * 1e6,
    }


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--ticks", type=int, default=20000)
    parser.add_argument("--mode", choices=["jit", "plain"], default=None, help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.mode:
        print(json.dumps(measure(args.ticks)))
        return 0

    rows = []
    for mode, flag in (("numba @njit", "0"), ("numpy fallback", "1")):
        env = dict(os.environ)
        env["CBFTELEOP_NO_NUMBA"] = flag
        proc = subprocess.run(
            [sys.executable, __file__, "--ticks", str(args.ticks), "--mode", "jit" if flag == "0" else "plain"],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return 1
        rows.append((mode, json.loads(proc.stdout.strip().splitlines()[-1])))

    print(f"{'path':<16} {'jit':>5} {'warmup':>9} {'filter/call':>12} {'trial tick':>11}")
    for mode, r in rows:
        print(
            f"{mode:<16} {str(r['using_numba']):>5} {r['warmup_s']:>8.2f}s "
            f"{r['filter_us']:>9.1f} us {r['tick_us']:>8.1f} us"
        )
    speedup = rows[1][1]["filter_us"] / rows[0][1]["filter_us"]
    print(f"\nfilter-call speedup (numba vs numpy): {speedup:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
