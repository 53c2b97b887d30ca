"""Pure-Python kernels: binary entropy, block-transform bracket, adversarial min.

Mirrors the compiled module `_core`; whichever imports cleanly is exported by
the package. The coarse grid stage is vectorized with numpy, the refinement
stage is scalar.
"""
from __future__ import annotations

import math

import numpy as np

IMPL = "pure"

_INV_LN2 = 1.0 / math.log(2.0)

GRID_POINTS = 17
REFINE_TOL = 1e-12
GOLDEN_ITERS = 40
MAX_SWEEPS = 40
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def binary_entropy(x: float) -> float:
    """H(x) in bits; H(0) = H(1) = 0."""
    if x < 0.0 or x > 1.0:
        raise ValueError(f"binary_entropy domain error: {x}")
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -(x * math.log(x) + (1.0 - x) * math.log(1.0 - x)) * _INV_LN2


def _ipow(x: float, b: int) -> float:
    # signed integer power, exact for the small exponents used here
    r = 1.0
    for _ in range(b):
        r *= x
    return r


def ad_bracket(phi: float, e: float, l4: float, b: int) -> float:
    """Entropy bracket 1 - (t1)H(a1/t1) - (t2)H(a3/t2) after b-fold blocking.

    Parametrized by phi = l2+l4, e = l3+l4 and l4; the remaining weights
    follow from the unit-sum constraint.
    """
    s12 = 1.0 - e
    s34 = e
    d12 = (1.0 - phi - e + l4) - (phi - l4)  # l1 - l2
    d34 = (e - l4) - l4  # l3 - l4
    ps12 = _ipow(s12, b)
    ps34 = _ipow(s34, b)
    p = ps12 + ps34
    out = 1.0
    if ps12 > 0.0:
        t1 = ps12 / p
        a = 0.5 * (1.0 + _ipow(d12, b) / ps12)  # lt1 / (lt1 + lt2)
        out -= t1 * binary_entropy(min(max(a, 0.0), 1.0))
    if ps34 > 0.0:
        t2 = ps34 / p
        a = 0.5 * (1.0 + _ipow(d34, b) / ps34)  # lt3 / (lt3 + lt4)
        out -= t2 * binary_entropy(min(max(a, 0.0), 1.0))
    return out


def ad_bracket_grid(phi: np.ndarray, e: np.ndarray, l4: np.ndarray, b: int) -> np.ndarray:
    """Vectorized `ad_bracket`; inputs broadcast together."""
    phi, e, l4 = np.broadcast_arrays(phi, e, l4)
    s12 = 1.0 - e
    s34 = e
    d12 = 1.0 - 2.0 * phi - e + 2.0 * l4
    d34 = e - 2.0 * l4
    ps12 = s12**b
    ps34 = s34**b
    p = ps12 + ps34

    def _h(x: np.ndarray) -> np.ndarray:
        x = np.clip(x, 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            h = -(x * np.log(x) + (1.0 - x) * np.log(1.0 - x)) * _INV_LN2
        return np.where((x <= 0.0) | (x >= 1.0), 0.0, h)

    out = np.ones_like(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        a1 = 0.5 * (1.0 + np.where(ps12 > 0.0, np.sign(d12) ** b * np.abs(d12) ** b / ps12, 0.0))
        a3 = 0.5 * (1.0 + np.where(ps34 > 0.0, np.sign(d34) ** b * np.abs(d34) ** b / ps34, 0.0))
        t1 = np.where(ps12 > 0.0, ps12 / p, 0.0)
        t2 = np.where(ps34 > 0.0, ps34 / p, 0.0)
    return out - t1 * _h(a1) - t2 * _h(a3)


def _l4_bounds(phi: float, e: float) -> tuple[float, float]:
    return max(0.0, phi + e - 1.0), min(phi, e)


def _golden_min(f, lo: float, hi: float) -> tuple[float, float]:
    # endpoints are evaluated explicitly: boundary minima are common here
    flo = f(lo)
    if hi - lo <= 0.0:
        return lo, flo
    fhi = f(hi)
    a, bnd = lo, hi
    c = bnd - _INVPHI * (bnd - a)
    d = a + _INVPHI * (bnd - a)
    fc, fd = f(c), f(d)
    for _ in range(GOLDEN_ITERS):
        if fc < fd:
            bnd, d, fd = d, c, fc
            c = bnd - _INVPHI * (bnd - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (bnd - a)
            fd = f(d)
    best_x, best_f = (c, fc) if fc < fd else (d, fd)
    if flo < best_f:
        best_x, best_f = lo, flo
    if fhi < best_f:
        best_x, best_f = hi, fhi
    return best_x, best_f


def _frac_bracket(phi: float, e: float, r: float, b: int) -> float:
    # l4 expressed as a fraction of its feasible interval; keeps the point
    # feasible while phi or e move, and lets e-moves drag l4 along the
    # diagonal valley the raw l4 coordinate gets stuck in
    lo, hi = _l4_bounds(phi, e)
    return ad_bracket(phi, e, lo + r * (hi - lo), b)


def _descend(
    obj: float, phi: float, e: float, r: float,
    phi_lo: float, phi_hi: float, e_lo: float, e_hi: float, b: int,
) -> tuple[float, float, float, float]:
    for _ in range(MAX_SWEEPS):
        prev = obj
        x, v = _golden_min(lambda x: _frac_bracket(x, e, r, b), phi_lo, phi_hi)
        if v < obj:
            obj, phi = v, x
        x, v = _golden_min(lambda x: _frac_bracket(phi, x, r, b), e_lo, e_hi)
        if v < obj:
            obj, e = v, x
        x, v = _golden_min(lambda x: _frac_bracket(phi, e, x, b), 0.0, 1.0)
        if v < obj:
            obj, r = v, x
        if prev - obj < REFINE_TOL:
            break
    return obj, phi, e, r


def inner_min(
    phi_lo: float, phi_hi: float, e_lo: float, e_hi: float, b: int
) -> tuple[float, float, float, float]:
    """Minimize the bracket over the (phi, e, l4) constraint box.

    Returns ``(objective, phi, e, l4)``. Coarse 17^3 grid plus per-corner
    line minima over l4 give the start set; each start gets a cyclic
    golden-section descent (l4 parametrized as a fraction of its feasible
    interval) to objective tolerance 1e-12, and the best descent wins.
    """
    if phi_lo > phi_hi or e_lo > e_hi:
        raise ValueError("infeasible constraint box")

    n = GRID_POINTS
    phis = np.linspace(phi_lo, phi_hi, n)
    es = np.linspace(e_lo, e_hi, n)
    pg, eg = np.meshgrid(phis, es, indexing="ij")
    l4lo = np.maximum(0.0, pg + eg - 1.0)
    l4hi = np.minimum(pg, eg)
    frac = np.linspace(0.0, 1.0, n)
    pg3 = pg[..., None]
    eg3 = eg[..., None]
    l43 = l4lo[..., None] + frac * (l4hi - l4lo)[..., None]
    vals = ad_bracket_grid(pg3, eg3, l43, b)
    k = int(np.argmin(vals))
    i, j, m = np.unravel_index(k, vals.shape)
    starts = [(float(vals[i, j, m]), float(pg[i, j]), float(eg[i, j]), float(frac[m]))]

    for phi_c in (phi_lo, phi_hi):
        for e_c in (e_lo, e_hi):
            lo, hi = _l4_bounds(phi_c, e_c)
            if hi > lo:
                r_c, v = _golden_min(
                    lambda t: _frac_bracket(phi_c, e_c, t, b), 0.0, 1.0
                )
                # closed-form interior candidate l4 = e*phi as a tiebreaker
                r_i = (min(max(e_c * phi_c, lo), hi) - lo) / (hi - lo)
                v_i = _frac_bracket(phi_c, e_c, r_i, b)
                if v_i < v:
                    r_c, v = r_i, v_i
            else:
                r_c, v = 0.0, ad_bracket(phi_c, e_c, lo, b)
            starts.append((v, phi_c, e_c, r_c))

    best = None
    for v0, phi0, e0, r0 in starts:
        out = _descend(v0, phi0, e0, r0, phi_lo, phi_hi, e_lo, e_hi, b)
        if best is None or out[0] < best[0]:
            best = out
    obj, phi, e, r = best
    lo, hi = _l4_bounds(phi, e)
    return obj, phi, e, lo + r * (hi - lo)
