"""Command-line scenario runner.

Exit codes: 0 on success, 2 for configuration problems, 3 for I/O
failures while writing results.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import ConfigError
from .scan import load_scan, run_scan


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amdiqkd-scan",
        description="Optimize finite-key rates over a scenario grid and write a CSV table.",
    )
    parser.add_argument("--config", required=True, help="TOML scan file")
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker processes for grid points (0 = one per CPU)",
    )
    parser.add_argument(
        "--asymptotic",
        action="store_true",
        help="drop all statistical-fluctuation and finite-size terms",
    )
    parser.add_argument("--verbose", action="store_true", help="progress on stderr")
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 0:
        print("error: --threads must be >= 0", file=sys.stderr)
        return 2
    try:
        spec = load_scan(args.config, asymptotic=args.asymptotic)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        rows = run_scan(spec, threads=args.threads, verbose=args.verbose)
    except OSError as exc:
        print(f"error: cannot write results: {exc}", file=sys.stderr)
        return 3
    if args.verbose:
        print(f"wrote {len(rows)} rows to {spec.output_path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
