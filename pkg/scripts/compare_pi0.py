"""Benchmark the pi0 estimators over a grid of true null proportions.

Defaults reproduce the acceptance cells (m=100, R=200). Pass a wider grid
and several alternatives for a fuller comparison, e.g.

    python scripts/compare_pi0.py --pi0-grid 0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1 \
        --alt uniform_low:0.01 --alt normal_shift:2:1 --alt normal_shift:3:1
"""

import argparse
import sys
import time

from fdrkit.pi0 import Pi0Spec
from fdrkit.sim import AlternativeSpec, compare_pi0_estimators


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--m", type=int, default=100)
    ap.add_argument("--pi0-grid", default="0.5,0.8,1.0")
    ap.add_argument("--alt", action="append")
    ap.add_argument("-R", "--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    alts = [AlternativeSpec.parse(a) for a in (args.alt or ["uniform_low:0.01"])]
    grid = [float(v) for v in args.pi0_grid.split(",")]
    t0 = time.perf_counter()
    table = compare_pi0_estimators(args.m, grid, alts, [Pi0Spec("last_hist"), Pi0Spec("storey")],
                                   args.reps, args.seed, args.workers)
    sys.stdout.write(table.to_csv())
    print(f"# {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    for r in table.rows:
        flag = "ok" if abs(r.mean - r.true_pi0) <= 0.1 else "outside 0.1"
        print(f"# {r.estimator:9s} pi0={r.true_pi0:<4g} {r.alt:22s} mean={r.mean:.3f} {flag}",
              file=sys.stderr)


if __name__ == "__main__":
    main()
