"""Figure rendering for amdiqkd scan CSVs."""

from .csvdata import EXPECTED_COLUMNS, DataError, FigureSpec, load_rows
from .render import render

__all__ = ["EXPECTED_COLUMNS", "DataError", "FigureSpec", "load_rows", "render"]
