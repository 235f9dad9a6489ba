# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid-sampling core.

Evaluates max |sum_j c_j f(x + o_j t)| over a dense (x, t) lattice for a
piecewise-affine f given as knot/slope/intercept arrays.  This is the one
loop in the package where float throughput matters: the sampling oracle
touches tens of millions of points per call.
"""

import numpy as np

cimport numpy as cnp


cdef inline double _eval_affine(double q, const double[::1] knots,
                                const double[::1] slope,
                                const double[::1] intercept) noexcept nogil:
    cdef Py_ssize_t lo, hi, mid, n
    n = knots.shape[0]
    if q < knots[0] or q >= knots[n - 1]:
        return 0.0
    lo = 0
    hi = n - 1
    # invariant: knots[lo] <= q < knots[hi]
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if knots[mid] <= q:
            lo = mid
        else:
            hi = mid
    return slope[lo] * q + intercept[lo]


def piecewise_eval(const double[::1] qs, const double[::1] knots,
                   const double[::1] slope, const double[::1] intercept):
    """Vectorized point evaluation; mirrors the fallback implementation."""
    cdef Py_ssize_t i, n = qs.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    if knots.shape[0] < 2:
        out.fill(0.0)
        return out
    with nogil:
        for i in range(n):
            view[i] = _eval_affine(qs[i], knots, slope, intercept)
    return out


def grid_max_abs_difference(const double[::1] xs, const double[::1] ts,
                            const double[::1] offsets, const double[::1] coeffs,
                            const double[::1] knots, const double[::1] slope,
                            const double[::1] intercept):
    """max over the (xs x ts) lattice of |sum_j coeffs[j] f(x + offsets[j] t)|."""
    cdef double best = 0.0, acc, x, t
    cdef Py_ssize_t i, j, r, nx = xs.shape[0], nt = ts.shape[0], m = offsets.shape[0]
    if knots.shape[0] < 2:
        return 0.0
    with nogil:
        for r in range(nt):
            t = ts[r]
            for i in range(nx):
                x = xs[i]
                acc = 0.0
                for j in range(m):
                    acc += coeffs[j] * _eval_affine(x + offsets[j] * t, knots, slope, intercept)
                if acc < 0.0:
                    acc = -acc
                if acc > best:
                    best = acc
    return best
