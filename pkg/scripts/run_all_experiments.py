#!/usr/bin/env python3
"""Run the full experiment set: operator accuracy, relaxation, regime
comparisons, stiffness sweep, and time refinement.

Writes CSV diagnostics under out/ (override with --out).  The frontend
renderer in frontend/ consumes exactly these files.
"""

import argparse
import os
import sys

import numpy as np

from levyfp import experiments
from levyfp.config import RunConfig


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out")
    ap.add_argument("--cache-dir", default="_opcache")
    ap.add_argument("--quick", action="store_true",
                    help="smaller grids, for smoke testing")
    args = ap.parse_args()

    N_v = 64 if args.quick else 128
    base = dict(cache_dir=args.cache_dir, N_v=N_v)

    print("== operator accuracy vs resolution ==")
    cfg = RunConfig(mode="operator_test", output_dir=f"{args.out}/operator",
                    **base).validate()
    experiments.operator_test(cfg)

    for s in (0.5, 0.6, 0.8):
        print(f"== homogeneous relaxation, s={s} ==")
        cfg = RunConfig(mode="homogeneous", s=s, dt=0.01,
                        output_dir=f"{args.out}/homogeneous_s{s}",
                        **base).validate()
        experiments.homogeneous(cfg)

    print("== kinetic-regime comparison, s=0.8 ==")
    cfg = RunConfig(mode="ap", s=0.8, eps=1.0, dt=0.05, T=0.5, ic="IC1",
                    L_x=np.pi, output_dir=f"{args.out}/kinetic",
                    **base).validate()
    out = experiments.kinetic_comparison(cfg)
    print(f"   density L1 gap vs reference: {out['l1']:.4f}")

    print("== stiffness sweep, s=0.6, IC1 ==")
    cfg = RunConfig(mode="eps_sweep", s=0.6, dt=0.1, T=1.0, ic="IC1",
                    L_x=np.pi, output_dir=f"{args.out}/eps_sweep",
                    **base).validate()
    out = experiments.eps_sweep(cfg)
    print(f"   ap_error order in eps: {out['slope']:.3f}")

    print("== time refinement, s=0.8, eps=1e-3, IC2 ==")
    cfg = RunConfig(mode="dt_refinement", s=0.8, eps=1e-3, ic="IC2",
                    L_x=5.0, N_x=200, T=0.1,
                    output_dir=f"{args.out}/dt_refinement",
                    **base).validate()
    out = experiments.dt_refinement(cfg)
    print(f"   e_dt slope: {out['slope']:.3f}")

    print("== diffusive-limit comparison, s=0.6, IC2 ==")
    cfg = RunConfig(mode="ap", s=0.6, eps=1e-5, dt=0.01, T=0.1, ic="IC2",
                    L_x=5.0, output_dir=f"{args.out}/limit_ap",
                    **base).validate()
    experiments.ap_run(cfg)
    cfg = RunConfig(mode="limit", s=0.6, dt=0.01, T=0.1, ic="IC2", L_x=5.0,
                    output_dir=f"{args.out}/limit_ref", **base).validate()
    experiments.limit_run(cfg)
    print(f"done; outputs under {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
