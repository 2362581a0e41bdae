"""Command-line front end for experiment campaigns.

    hardylab run CONFIG [--out DIR] [--fail-fast] [--jobs N]
    hardylab sweep CONFIG --param NAME --values 1,10,100 [--out DIR] [--jobs N]
    hardylab sequence WEIGHT [--interval A B] [--k-max K] [--out FILE]

Exit codes: 0 all declared bounds passed, 1 at least one experiment failed,
2 configuration or usage error.  The HARDY_LAB_SEED environment variable
overrides every experiment's seed.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, HardyLabError
from .harness import run, sequence_csv, sweep
from .measure import Interval


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardylab",
        description="Run weighted-inequality experiment campaigns.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run every experiment in a config file")
    p_run.add_argument("config", help="campaign file of [experiment] blocks")
    p_run.add_argument("--out", default=".", metavar="DIR",
                       help="directory for report.csv and summary.txt")
    p_run.add_argument("--fail-fast", action="store_true",
                       help="stop at the first failing experiment")
    p_run.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="run up to N experiments concurrently")

    p_sweep = sub.add_parser("sweep",
                             help="repeat the campaign over parameter values")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True, metavar="NAME",
                         help="numeric config key to vary")
    p_sweep.add_argument("--values", required=True, metavar="CSV-LIST",
                         help="comma-separated values, e.g. 1,10,100")
    p_sweep.add_argument("--out", default=".", metavar="DIR")
    p_sweep.add_argument("--jobs", type=int, default=1, metavar="N")

    p_seq = sub.add_parser(
        "sequence", help="export a discretizing sequence as CSV")
    p_seq.add_argument("weight",
                       help="weight spec, e.g. 'unit' or 'powerlaw 1 0.5 0'")
    p_seq.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"),
                       default=(0.0, 1.0))
    p_seq.add_argument("--k-max", type=int, default=16, metavar="K",
                       help="deepest dyadic index")
    p_seq.add_argument("--k-min", type=int, default=None, metavar="K",
                       help="head truncation index for infinite-mass weights")
    p_seq.add_argument("--out", default="-", metavar="FILE",
                       help="output path, or - for stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            return run(args.config, out_dir=args.out,
                       fail_fast=args.fail_fast, jobs=max(1, args.jobs))
        if args.command == "sequence":
            text = sequence_csv(args.weight,
                                Interval(args.interval[0], args.interval[1]),
                                k_max=args.k_max, k_min=args.k_min)
            if args.out == "-":
                sys.stdout.write(text)
            else:
                with open(args.out, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            return 0
        try:
            values = [float(tok) for tok in args.values.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --values list {args.values!r}: {exc}") from exc
        if not values:
            raise ConfigError("--values list is empty")
        return sweep(args.config, args.param, values, out_dir=args.out,
                     jobs=max(1, args.jobs))
    except FileNotFoundError as exc:
        print(f"hardylab: {exc}", file=sys.stderr)
        return 2
    except HardyLabError as exc:
        print(f"hardylab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
