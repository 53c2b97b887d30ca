"""Command line for rendering amdiqkd scan CSVs into figures.

Two entry styles:

    amdiqkd-figures render --spec figures.toml
    amdiqkd-figures fig2 --csv results/fig2.csv --out fig2.png

A spec file holds one or more [[figure]] tables:

    [[figure]]
    kind = "fig2"
    csv = ["data/fig2.csv"]
    out = "build/fig2.png"
    log_y = true      # optional
    show_b = true     # optional
    show_plob = true  # optional
    title = "..."     # optional
"""
from __future__ import annotations

import argparse
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .csvdata import FIGURE_KINDS, DataError, FigureSpec
from .render import render

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _spec_from_table(table: dict, base_dir: str) -> FigureSpec:
    try:
        kind = table["kind"]
        csvs = table["csv"]
        out = table["out"]
    except KeyError as exc:
        raise DataError(f"figure table missing key {exc.args[0]!r}") from exc
    if isinstance(csvs, str):
        csvs = [csvs]
    return FigureSpec(
        kind=str(kind),
        csv_paths=tuple(os.path.join(base_dir, str(p)) for p in csvs),
        output_path=os.path.join(base_dir, str(out)),
        log_y=bool(table.get("log_y", True)),
        show_b=bool(table.get("show_b", True)),
        show_plob=bool(table.get("show_plob", True)),
        title=str(table.get("title", "")),
    )


def load_specs(path: str) -> list[FigureSpec]:
    """Parse a spec file into FigureSpecs; paths resolve relative to it."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    tables = doc.get("figure")
    if not isinstance(tables, list) or not tables:
        raise DataError(f"{path}: expected at least one [[figure]] table")
    base = os.path.dirname(os.path.abspath(path))
    return [_spec_from_table(t, base) for t in tables]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amdiqkd-figures",
        description="Render amdiqkd scan CSVs into figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    spec_cmd = sub.add_parser("render", help="render every figure in a spec file")
    spec_cmd.add_argument("--spec", required=True, help="TOML spec file")
    for kind in FIGURE_KINDS:
        one = sub.add_parser(kind, help=f"render a single {kind} analogue")
        one.add_argument("--csv", required=True, nargs="+", help="input CSV path(s)")
        one.add_argument("--out", required=True, help="output image path")
        one.add_argument("--title", default="")
        one.add_argument("--linear-y", action="store_true", help="linear rate axis")
        one.add_argument("--no-b", action="store_true", help="skip optimal-b markers")
        one.add_argument("--no-plob", action="store_true", help="skip the PLOB overlay")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            specs = load_specs(args.spec)
        else:
            specs = [
                FigureSpec(
                    kind=args.command,
                    csv_paths=tuple(args.csv),
                    output_path=args.out,
                    log_y=not args.linear_y,
                    show_b=not args.no_b,
                    show_plob=not args.no_plob,
                    title=args.title,
                )
            ]
        for spec in specs:
            render(spec)
            print(f"wrote {spec.output_path}")
    except (DataError, tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
