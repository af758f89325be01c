"""Command line interface.

One subcommand per run mode; `--config` reads a flat key=value file and
individual flags override it.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure, 4 self-test failure.
"""

from __future__ import annotations

import argparse
import sys

from .collision import NumericalFailure
from .config import ConfigError, MODES, build_config, parse_config_file
from . import experiments

_FLAGS = (
    ("--s", "s", float), ("--eps", "eps", float), ("--gamma", "gamma", float),
    ("--N-v", "N_v", int), ("--N-x", "N_x", int),
    ("--L-v", "L_v", float), ("--L-x", "L_x", float),
    ("--l-lim", "l_lim", int), ("--dt", "dt", float), ("--T", "T", float),
    ("--ic", "ic", str), ("--ic-file", "ic_file", str),
    ("--delta", "delta", float),
    ("--eps-list", "eps_list", str), ("--dt-list", "dt_list", str),
    ("--cache-dir", "cache_dir", str),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyfp",
        description="Pseudospectral solvers for a kinetic equation with "
                    "fractional velocity diffusion and its heavy-tail "
                    "diffusion limit.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", type=str, default=None,
                       help="flat key=value configuration file")
        p.add_argument("--out", type=str, default=None, dest="output_dir",
                       help="output directory")
        for flag, dest, typ in _FLAGS:
            p.add_argument(flag, dest=dest, type=typ, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        overrides = {dest: getattr(args, dest) for _, dest, _ in _FLAGS}
        overrides["output_dir"] = args.output_dir
        cfg = build_config(args.mode, file_values, overrides)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    try:
        result = experiments.run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    if cfg.mode == "selftest":
        failed = False
        for name, ok, detail in result:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
            failed |= not ok
        return 4 if failed else 0

    if isinstance(result, dict):
        for key in ("series", "equilibrium", "rho_snapshot", "f_snapshot"):
            if key in result and isinstance(result[key], str):
                print(f"wrote {result[key]}")
        for key in ("slope", "l1"):
            if key in result:
                print(f"{key} = {result[key]:.6g}")
    elif isinstance(result, str):
        print(f"wrote {result}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
