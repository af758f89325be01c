#!/usr/bin/env python3
"""Print the equilibrium tail behavior for a few fractional orders.

A minimal console demo: extracts the numerical equilibrium, fits the
log-log tail slope over the outermost velocity decade, and compares with
the predicted decay -(1+2s).
"""

import argparse
import sys

from levyfp.collision import compute_equilibrium
from levyfp.grids import build_velocity_grid


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N-v", type=int, default=128)
    ap.add_argument("--L-v", type=float, default=3.0)
    ap.add_argument("--cache-dir", default="_opcache")
    args = ap.parse_args()

    grid = build_velocity_grid(args.N_v, args.L_v)
    print(f"{'s':>5} {'tail slope':>12} {'predicted':>10} {'t*':>7} {'residual':>10}")
    for s in (0.5, 0.6, 0.8):
        prof = compute_equilibrium(s, grid, 0.01, cache_dir=args.cache_dir)
        print(f"{s:5.2f} {prof.tail_slope:12.3f} {-(1 + 2 * s):10.1f} "
              f"{prof.t_converged:7.2f} {prof.residual:10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
