"""Command-line driver.

Subcommands: simulate (compressible run), simulate-limit (incompressible
run), study (full epsilon sweep), inspect (snapshot header + norms).
Exit codes: 0 success, 2 config error, 3 runtime/monitor failure,
4 I/O or snapshot-format error.
"""

from __future__ import annotations

import argparse
import sys

from .config import parse_config
from .errors import ConfigError, SnapshotError, StateError
from .snapshot import describe_snapshot
from .study import run_limit_simulation, run_simulation, run_study

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oblab",
        description="Pseudo-spectral runs of a compressible viscoelastic "
        "fluid model and its low-Mach limit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_command(name: str, help_text: str):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", help="path to a key=value config file")
        cmd.add_argument("--output-dir", help="override the configured output dir")
        cmd.add_argument(
            "--no-timestamp",
            action="store_true",
            help="suppress the timestamp header line in CSV outputs",
        )
        cmd.add_argument(
            "--store-snapshots",
            type=int,
            metavar="STRIDE",
            help="write a state snapshot every STRIDE steps",
        )
        return cmd

    add_run_command("simulate", "single compressible run at the largest epsilon")
    add_run_command("simulate-limit", "single incompressible limit run")
    add_run_command("study", "full epsilon-sweep convergence study")

    inspect = sub.add_parser("inspect", help="print snapshot header and norms")
    inspect.add_argument("snapshot", help="path to a snapshot file")
    return parser


def _load_config(args):
    with open(args.config, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_config(text)
    if args.output_dir:
        from dataclasses import replace

        cfg = replace(cfg, output_dir=args.output_dir)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "inspect":
            print(describe_snapshot(args.snapshot))
            return EXIT_OK
        cfg = _load_config(args)
        if args.store_snapshots is not None and args.store_snapshots < 1:
            raise ConfigError("--store-snapshots stride must be at least 1")
        runner = {
            "simulate": run_simulation,
            "simulate-limit": run_limit_simulation,
            "study": run_study,
        }[args.command]
        return runner(
            cfg,
            no_timestamp=args.no_timestamp,
            store_snapshots=args.store_snapshots,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StateError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except SnapshotError as exc:
        print(f"snapshot error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
