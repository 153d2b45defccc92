"""Argument parsing and exit-code policy for the ``meancover`` entry point.

Exit codes: 0 when every invariant holds, 1 when a report contains a
violation, 2 when the configuration cannot be used at all.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .errors import ConfigError, MeancoverError
from .harness import COMMANDS, load_config, write_report


def _default_config() -> Path:
    return Path(str(resources.files("meancover").joinpath("data/default_corpus.cfg")))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="meancover",
        description="Area oracles, coverage growth, and annulus-modulus "
        "verification for analytic self-maps of the disk.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=fn.__doc__.splitlines()[0].strip())
        sp.add_argument(
            "--config",
            default=None,
            help="run configuration file (defaults to the packaged corpus)",
        )
        sp.add_argument(
            "--out",
            default="meancover-out",
            help="directory receiving report.json and the CSV/SVG artifacts",
        )
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument(
            "--seed", type=int, default=None, help="override the Monte Carlo seed"
        )
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg_path = Path(args.config) if args.config else _default_config()
        config = load_config(
            cfg_path, out_dir=args.out, jobs=args.jobs, seed=args.seed
        )
        report = COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"meancover: config error: {exc}", file=sys.stderr)
        return 2
    except MeancoverError as exc:
        print(f"meancover: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out = write_report(report, config.out_dir)
    for line in report.violations:
        print(f"VIOLATION {line}", file=sys.stderr)
    status = "pass" if report.passed else "FAIL"
    print(f"meancover {args.command}: {status} ({len(report.records)} records) -> {out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
