"""Reader for the amdiqkd-scan CSV contract.

The scan CLI writes a fixed header; this module parses those files into
plain row dicts of floats and fails loudly (naming the column) when a
file does not match the contract.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

EXPECTED_COLUMNS = (
    "L_km",
    "N",
    "e_d_z",
    "E_hom",
    "rate_no_ad",
    "rate_ad",
    "b_opt",
    "plob",
    "mu",
    "nu",
    "p_mu",
    "p_nu",
    "Tc",
    "E_z",
    "phi11_z_upper",
    "s11_frac",
)

FIGURE_KINDS = ("fig2", "fig3", "fig4", "fig5")


class DataError(ValueError):
    """CSV does not match the scan contract or carries no data."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: input CSV(s), kind, output image, toggles."""

    kind: str
    csv_paths: tuple[str, ...]
    output_path: str
    log_y: bool = True
    show_b: bool = True
    show_plob: bool = True
    title: str = ""

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise DataError(f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}")
        if not self.csv_paths:
            raise DataError("figure spec needs at least one input CSV")


def load_rows(path: str) -> list[dict[str, float]]:
    """Parse one contract CSV; every value comes back as float."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        missing = [c for c in EXPECTED_COLUMNS if c not in header]
        if missing:
            raise DataError(f"{path}: missing column {missing[0]!r} (header {header})")
        rows = []
        for i, raw in enumerate(reader):
            try:
                rows.append({c: float(raw[c]) for c in EXPECTED_COLUMNS})
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}: row {i + 1} is not numeric: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    return sorted(rows, key=lambda r: (r["N"], r["e_d_z"], r["E_hom"], r["L_km"]))


def series(rows: list[dict[str, float]], key: str) -> list[float]:
    return [r[key] for r in rows]


def positive_pairs(
    rows: list[dict[str, float]], x_key: str, y_key: str
) -> tuple[list[float], list[float]]:
    """(x, y) with zero/negative y dropped; log plots cannot show them."""
    xs, ys = [], []
    for r in rows:
        if r[y_key] > 0.0:
            xs.append(r[x_key])
            ys.append(r[y_key])
    return xs, ys


def group_by(
    rows: list[dict[str, float]], key: str
) -> list[tuple[float, list[dict[str, float]]]]:
    """Split rows into (value, subrows) groups, ordered by value."""
    groups: dict[float, list[dict[str, float]]] = {}
    for r in rows:
        groups.setdefault(r[key], []).append(r)
    return sorted(groups.items())
