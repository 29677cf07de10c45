#!/usr/bin/env python3
"""Benchmark the compiled exploration core against the pure-Python engine.

Runs each bundled model on both engines (fresh lowering each time, so memo
tables don't leak between runs) and prints states/second.  Invoke from the
repository root:

    python3 benchmarks/bench_engines.py [--cap 100000]
"""

from __future__ import annotations

import argparse
import time

from ebench.catalog import load_model
from ebench.engine import ENGINE_NAME, RunOptions, pure_run, run
from ebench.lowering import LoweredMachine

CASES = [
    ("m3", 100_000),
    ("m2r", 100_000),
    ("m8t", 100_000),
    ("m7", None),  # capped by --cap
]


def bench(engine_fn, machine, cap: int) -> tuple[int, int, float]:
    low = LoweredMachine(machine)
    opts = RunOptions(max_states=cap, record_transitions=False, check_invariants=True)
    t0 = time.perf_counter()
    res = engine_fn(low, opts)
    dt = time.perf_counter() - t0
    return len(res.states), res.n_transitions, dt


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cap", type=int, default=100_000, help="state cap for m7")
    args = ap.parse_args()

    if run is pure_run:
        print("note: compiled core not built; both columns run the pure engine")
    print(f"active engine: {ENGINE_NAME}")
    print(f"{'model':8} {'states':>9} {'trans':>10} {'compiled':>10} {'pure':>10} {'speedup':>8}")
    for name, cap in CASES:
        cap = cap or args.cap
        machine = load_model(name)
        n1, t1, dt_c = bench(run, machine, cap)
        n2, t2, dt_p = bench(pure_run, machine, cap)
        assert (n1, t1) == (n2, t2), f"engine mismatch on {name}"
        rate_c = n1 / dt_c if dt_c else float("inf")
        rate_p = n2 / dt_p if dt_p else float("inf")
        print(
            f"{name:8} {n1:>9} {t1:>10} {dt_c:>9.2f}s {dt_p:>9.2f}s {dt_p / dt_c:>7.1f}x"
            f"   ({rate_c:,.0f} vs {rate_p:,.0f} states/s)"
        )


if __name__ == "__main__":
    main()
