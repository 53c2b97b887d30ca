# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: binary entropy, block-transform bracket, adversarial min.

Behaviour matches `_pure`; the pure module is the import-time fallback.
"""
from libc.math cimport log, sqrt

IMPL = "compiled"

cdef double INV_LN2 = 1.4426950408889634
cdef int GRID_POINTS = 17
cdef double REFINE_TOL = 1e-12
cdef int GOLDEN_ITERS = 40
cdef int MAX_SWEEPS = 40
cdef double INVPHI = 0.6180339887498949


cdef inline double _h(double x) nogil:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -(x * log(x) + (1.0 - x) * log(1.0 - x)) * INV_LN2


cdef inline double _ipow(double x, int b) nogil:
    cdef double r = 1.0
    cdef int i
    for i in range(b):
        r *= x
    return r


cdef inline double _clip01(double x) nogil:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


cdef double _bracket(double phi, double e, double l4, int b) nogil:
    cdef double s12 = 1.0 - e
    cdef double s34 = e
    cdef double d12 = 1.0 - 2.0 * phi - e + 2.0 * l4
    cdef double d34 = e - 2.0 * l4
    cdef double ps12 = _ipow(s12, b)
    cdef double ps34 = _ipow(s34, b)
    cdef double p = ps12 + ps34
    cdef double out = 1.0
    cdef double a
    if ps12 > 0.0:
        a = 0.5 * (1.0 + _ipow(d12, b) / ps12)
        out -= (ps12 / p) * _h(_clip01(a))
    if ps34 > 0.0:
        a = 0.5 * (1.0 + _ipow(d34, b) / ps34)
        out -= (ps34 / p) * _h(_clip01(a))
    return out


def binary_entropy(double x):
    """H(x) in bits; H(0) = H(1) = 0."""
    if x < 0.0 or x > 1.0:
        raise ValueError(f"binary_entropy domain error: {x}")
    return _h(x)


def ad_bracket(double phi, double e, double l4, int b):
    """Entropy bracket after b-fold blocking; see the pure twin for details."""
    return _bracket(phi, e, l4, b)


cdef inline double _l4_lo(double phi, double e) nogil:
    cdef double v = phi + e - 1.0
    return v if v > 0.0 else 0.0


cdef inline double _l4_hi(double phi, double e) nogil:
    return phi if phi < e else e


cdef inline double _clamp(double x, double lo, double hi) nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


# l4 expressed as a fraction of its feasible interval; keeps the point
# feasible while phi or e move, and lets e-moves drag l4 along the diagonal
# valley the raw l4 coordinate gets stuck in
cdef inline double _frac_bracket(double phi, double e, double r, int b) nogil:
    cdef double lo = _l4_lo(phi, e)
    cdef double hi = _l4_hi(phi, e)
    return _bracket(phi, e, lo + r * (hi - lo), b)


# coordinate ids for the line search
cdef int C_PHI = 0
cdef int C_E = 1
cdef int C_R = 2


cdef inline double _line(int coord, double x, double phi, double e, double r, int b) nogil:
    if coord == C_PHI:
        return _frac_bracket(x, e, r, b)
    if coord == C_E:
        return _frac_bracket(phi, x, r, b)
    return _frac_bracket(phi, e, x, b)


cdef (double, double) _golden(int coord, double lo, double hi,
                              double phi, double e, double r, int b) nogil:
    cdef double flo = _line(coord, lo, phi, e, r, b)
    if hi - lo <= 0.0:
        return lo, flo
    cdef double fhi = _line(coord, hi, phi, e, r, b)
    cdef double a = lo, bnd = hi
    cdef double c = bnd - INVPHI * (bnd - a)
    cdef double d = a + INVPHI * (bnd - a)
    cdef double fc = _line(coord, c, phi, e, r, b)
    cdef double fd = _line(coord, d, phi, e, r, b)
    cdef int i
    for i in range(GOLDEN_ITERS):
        if fc < fd:
            bnd = d
            d = c
            fd = fc
            c = bnd - INVPHI * (bnd - a)
            fc = _line(coord, c, phi, e, r, b)
        else:
            a = c
            c = d
            fc = fd
            d = a + INVPHI * (bnd - a)
            fd = _line(coord, d, phi, e, r, b)
    cdef double bx, bf
    if fc < fd:
        bx, bf = c, fc
    else:
        bx, bf = d, fd
    if flo < bf:
        bx, bf = lo, flo
    if fhi < bf:
        bx, bf = hi, fhi
    return bx, bf


cdef (double, double, double, double) _descend(
    double obj, double phi, double e, double r,
    double phi_lo, double phi_hi, double e_lo, double e_hi, int b,
) nogil:
    cdef double prev, x, v
    cdef int i
    for i in range(MAX_SWEEPS):
        prev = obj
        x, v = _golden(C_PHI, phi_lo, phi_hi, phi, e, r, b)
        if v < obj:
            obj = v
            phi = x
        x, v = _golden(C_E, e_lo, e_hi, phi, e, r, b)
        if v < obj:
            obj = v
            e = x
        x, v = _golden(C_R, 0.0, 1.0, phi, e, r, b)
        if v < obj:
            obj = v
            r = x
        if prev - obj < REFINE_TOL:
            break
    return obj, phi, e, r


def inner_min(double phi_lo, double phi_hi, double e_lo, double e_hi, int b):
    """Minimize the bracket over the (phi, e, l4) constraint box.

    Returns ``(objective, phi, e, l4)``; algorithm identical to the pure twin.
    """
    if phi_lo > phi_hi or e_lo > e_hi:
        raise ValueError("infeasible constraint box")

    cdef int n = GRID_POINTS
    cdef int i, j, k, s
    cdef double phi, e, l4, lo, hi, v, x, r, r_i, v_i, obj
    cdef double best_v = 1e300
    cdef double best_phi = phi_lo, best_e = e_lo, best_r = 0.0
    cdef double dphi = (phi_hi - phi_lo) / (n - 1)
    cdef double de = (e_hi - e_lo) / (n - 1)
    cdef double starts_v[5]
    cdef double starts_phi[5]
    cdef double starts_e[5]
    cdef double starts_r[5]

    with nogil:
        # coarse grid start
        for i in range(n):
            phi = phi_lo + dphi * i
            for j in range(n):
                e = e_lo + de * j
                lo = _l4_lo(phi, e)
                hi = _l4_hi(phi, e)
                for k in range(n):
                    v = _bracket(phi, e, lo + (hi - lo) * k / (n - 1), b)
                    if v < best_v:
                        best_v = v
                        best_phi = phi
                        best_e = e
                        best_r = (<double>k) / (n - 1)
        starts_v[0] = best_v
        starts_phi[0] = best_phi
        starts_e[0] = best_e
        starts_r[0] = best_r
        # corner starts with line-minimized l4 (plus the closed-form
        # interior candidate l4 = e*phi as a tiebreaker)
        s = 1
        for i in range(2):
            phi = phi_lo if i == 0 else phi_hi
            for j in range(2):
                e = e_lo if j == 0 else e_hi
                lo = _l4_lo(phi, e)
                hi = _l4_hi(phi, e)
                if hi > lo:
                    r, v = _golden(C_R, 0.0, 1.0, phi, e, 0.0, b)
                    r_i = (_clamp(e * phi, lo, hi) - lo) / (hi - lo)
                    v_i = _frac_bracket(phi, e, r_i, b)
                    if v_i < v:
                        r = r_i
                        v = v_i
                else:
                    r = 0.0
                    v = _bracket(phi, e, lo, b)
                starts_v[s] = v
                starts_phi[s] = phi
                starts_e[s] = e
                starts_r[s] = r
                s += 1

        best_v = 1e300
        for s in range(5):
            obj, phi, e, r = _descend(
                starts_v[s], starts_phi[s], starts_e[s], starts_r[s],
                phi_lo, phi_hi, e_lo, e_hi, b,
            )
            if obj < best_v:
                best_v = obj
                best_phi = phi
                best_e = e
                best_r = r

        lo = _l4_lo(best_phi, best_e)
        hi = _l4_hi(best_phi, best_e)
        l4 = lo + best_r * (hi - lo)

    return best_v, best_phi, best_e, l4
