"""Command-line entry point.

Subcommands:
  run       simulate one configured scenario and write its metrics as CSV
  preset    regenerate one of the built-in figure sweeps (fig2..fig6)
  validate  check a config file and exit

Exit codes: 0 success, 1 config/validation error, 2 numerical failure.
Set CRSENSE_WORKERS to parallelize replications.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_config
from .detection import NumericsError
from .experiments import PRESET_IDS, build_preset_table, run_scenario_table, write_csv


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    parser.add_argument("--reps", type=int, default=None, help="override the replication count")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument(
        "--no-plot", action="store_true", help="skip rendering the PNG next to the CSV"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crsense", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a configured scenario")
    p_run.add_argument("--config", required=True, help="scenario config file (key = value lines)")
    _add_common(p_run)

    p_preset = sub.add_parser("preset", help="regenerate a built-in figure sweep")
    p_preset.add_argument("--figure", required=True, choices=PRESET_IDS)
    _add_common(p_preset)

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("--config", required=True)
    return parser


def _render(table, out, figure, skip):
    if skip:
        return
    from .plotting import render_table

    png = str(Path(out).with_suffix(".png"))
    render_table(table, png, figure=figure)
    print(f"wrote {png}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            load_config(args.config)
            print("config OK")
            return 0
        if args.command == "run":
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg = replace(cfg, seed=args.seed).validate()
            if args.reps is not None:
                cfg = replace(cfg, replications=args.reps).validate()
            table = run_scenario_table(cfg)
            write_csv(table, args.out)
            print(f"wrote {args.out}")
            _render(table, args.out, None, args.no_plot)
            return 0
        # preset
        table = build_preset_table(args.figure, reps=args.reps, seed=args.seed)
        write_csv(table, args.out)
        print(f"wrote {args.out}")
        _render(table, args.out, args.figure, args.no_plot)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
