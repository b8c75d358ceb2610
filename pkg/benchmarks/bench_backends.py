#!/usr/bin/env python3
"""Compare the numba-compiled kernel against the pure numpy fallback.

The backend is chosen at import time from MINESIM_NO_NUMBA, so each
measurement runs in a subprocess. Outcomes must agree exactly; only the
wall time may differ.

Usage: python benchmarks/bench_backends.py [--timesteps N] [--reps R]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

CASES = [
    ("concurrent 1 selfish", "concurrent", (0.38, 0.62), 1),
    ("concurrent 2 selfish", "concurrent", (0.29, 0.29, 0.42), 2),
    ("concurrent 3 selfish", "concurrent", (0.23, 0.2, 0.2, 0.37), 3),
    ("conventional 1 selfish", "conventional", (0.35, 0.65), 1),
]

WORKER = textwrap.dedent("""
    import json, sys, time
    from minesim.engine import PowerConfiguration, RunConfig, run
    from minesim import _kernel

    model, powers, k, timesteps, reps = json.loads(sys.argv[1])
    pc = PowerConfiguration(tuple(powers), 0.5, k)
    run(RunConfig(model=model, timesteps=min(timesteps, 2000), seed=0), pc)
    t0 = time.perf_counter()
    outcomes = []
    for seed in range(reps):
        out = run(RunConfig(model=model, timesteps=timesteps, seed=seed), pc)
        outcomes.append([out.winning_tip, out.chain_length,
                         list(out.blocks_per_miner)])
    elapsed = time.perf_counter() - t0
    print(json.dumps({"backend": _kernel.BACKEND, "seconds": elapsed,
                      "outcomes": outcomes}))
""")


def measure(case, timesteps, reps, disable_numba):
    _, model, powers, k = case
    env = dict(os.environ, MINESIM_NO_NUMBA="1" if disable_numba else "0")
    payload = json.dumps([model, list(powers), k, timesteps, reps])
    proc = subprocess.run([sys.executable, "-c", WORKER, payload],
                          capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--timesteps", type=int, default=100_000)
    parser.add_argument("--reps", type=int, default=3)
    args = parser.parse_args()

    print(f"{'case':<26} {'numba':>10} {'numpy':>10} {'speedup':>9}   match")
    for case in CASES:
        fast = measure(case, args.timesteps, args.reps, disable_numba=False)
        slow = measure(case, args.timesteps, args.reps, disable_numba=True)
        match = fast["outcomes"] == slow["outcomes"]
        ratio = slow["seconds"] / fast["seconds"]
        print(f"{case[0]:<26} {fast['seconds']:>9.2f}s {slow['seconds']:>9.2f}s"
              f" {ratio:>8.1f}x   {'yes' if match else 'NO'}")
        if not match:
            raise SystemExit("backend outcomes diverged")
    print("\nbackends agree on every outcome")


if __name__ == "__main__":
    main()
