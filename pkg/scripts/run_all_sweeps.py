#!/usr/bin/env python3
"""Run every built-in scalability plan at full scale and write reports.

This is the long-running reproduction driver: ORDER and its NEG_JOIN/JUNK
variants sweep l up to 100, TRAP sweeps l up to 33 (where sizing is expected
to hit the population ceiling), and the fixed-size junk study sweeps the junk
count at depth budgets 6 and 7.  Expect hours of wall time at full scale;
use --sizes/--runs to scale it down.
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gpscale.harness import PLAN_NAMES, build_plan, emit_report, scalability_sweep


def parse_args():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--plans", default=",".join(PLAN_NAMES),
                   help="comma-separated plan names (default: all)")
    p.add_argument("--sizes", default=None,
                   help="override the swept sizes for every plan, e.g. 5,10,20")
    p.add_argument("--runs", type=int, default=30, help="runs per batch (default: 30)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ceiling", type=int, default=2**20,
                   help="population ceiling before a cell is flagged (default: 2^20)")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    return p.parse_args()


def main():
    args = parse_args()
    sizes = None
    if args.sizes:
        sizes = tuple(int(tok) for tok in args.sizes.split(","))
    for name in args.plans.split(","):
        plan = build_plan(
            name,
            sizes=sizes,
            seed_base=args.seed,
            n_runs=args.runs,
            ceiling=args.ceiling,
        )
        print(f"=== plan {name}: {len(plan.rows)} cells ===", flush=True)
        started = time.perf_counter()
        rows = scalability_sweep(plan, workers=args.workers, log=print)
        elapsed = time.perf_counter() - started
        csv_path, svg_path = emit_report(rows, args.out, basename=name,
                                         x_field=plan.x_field)
        flagged = sum(r.success_rate < 1.0 for r in rows)
        print(f"plan {name}: wrote {csv_path} and {svg_path} "
              f"({flagged} flagged cells, {elapsed:.0f}s)", flush=True)


if __name__ == "__main__":
    main()
