"""Kernel dispatch: compiled extension when available, pure Python otherwise.

``IMPL`` reports which backend is active ("compiled" or "pure"). The
vectorized grid helper lives only in the pure module and is re-exported
unconditionally (tests and brute-force oracles use it).
"""
from ._pure import ad_bracket_grid

try:  # pragma: no cover - depends on the build environment
    from ._core import IMPL, ad_bracket, binary_entropy, inner_min
except ImportError:  # pragma: no cover
    from ._pure import IMPL, ad_bracket, binary_entropy, inner_min

__all__ = ["IMPL", "ad_bracket", "ad_bracket_grid", "binary_entropy", "inner_min"]
