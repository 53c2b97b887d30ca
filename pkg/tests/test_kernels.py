"""Parity between the compiled and pure-Python kernel implementations."""
import random

import numpy as np
import pytest

from amdiqkd import _kernels
from amdiqkd._kernels import _pure

core = pytest.importorskip("amdiqkd._kernels._core")


def test_active_implementation_is_compiled():
    # the build ships the extension; the pure path is the fallback
    assert _kernels.IMPL in ("compiled", "pure")


def test_entropy_parity():
    for x in np.linspace(0.0, 1.0, 101):
        assert core.binary_entropy(float(x)) == pytest.approx(
            _pure.binary_entropy(float(x)), abs=1e-15
        )


def test_bracket_parity():
    rng = random.Random(11)
    for _ in range(500):
        phi = rng.uniform(0.0, 0.6)
        e = rng.uniform(0.0, 0.6)
        lo = max(0.0, phi + e - 1.0)
        hi = min(phi, e)
        l4 = rng.uniform(lo, hi) if hi > lo else lo
        for b in (1, 2, 3, 4):
            assert core.ad_bracket(phi, e, l4, b) == pytest.approx(
                _pure.ad_bracket(phi, e, l4, b), abs=1e-12
            )


def test_inner_min_parity():
    rng = random.Random(23)
    for _ in range(40):
        phi_hi = rng.uniform(0.0, 0.5)
        e_hi = rng.uniform(0.0, 0.5)
        phi_lo = rng.uniform(0.0, phi_hi)
        e_lo = rng.uniform(0.0, e_hi)
        for b in (1, 2):
            obj_c = core.inner_min(phi_lo, phi_hi, e_lo, e_hi, b)[0]
            obj_p = _pure.inner_min(phi_lo, phi_hi, e_lo, e_hi, b)[0]
            assert obj_c == pytest.approx(obj_p, abs=1e-9)


def test_grid_matches_scalar():
    rng = random.Random(5)
    phis = np.array([rng.uniform(0.0, 0.5) for _ in range(64)])
    es = np.array([rng.uniform(0.0, 0.5) for _ in range(64)])
    l4s = np.minimum(phis, es) * 0.5
    for b in (1, 2, 3):
        grid = _pure.ad_bracket_grid(phis, es, l4s, b)
        for i in range(phis.size):
            assert grid[i] == pytest.approx(
                _pure.ad_bracket(float(phis[i]), float(es[i]), float(l4s[i]), b),
                abs=1e-12,
            )
