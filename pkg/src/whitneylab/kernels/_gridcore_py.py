"""Pure-numpy fallback for the grid-sampling core.

Same contract as the compiled module.  Row-at-a-time vectorization keeps
peak memory at O(len(xs)) while staying within a small factor of the
compiled kernel.
"""

import numpy as np


def piecewise_eval(qs, knots, slope, intercept):
    qs = np.asarray(qs, dtype=np.float64)
    if len(knots) < 2:
        return np.zeros_like(qs)
    idx = np.searchsorted(knots, qs, side="right") - 1
    inside = (idx >= 0) & (qs < knots[-1])
    i = np.clip(idx, 0, len(knots) - 2)
    return np.where(inside, slope[i] * qs + intercept[i], 0.0)


def grid_max_abs_difference(xs, ts, offsets, coeffs, knots, slope, intercept):
    xs = np.asarray(xs, dtype=np.float64)
    if len(knots) < 2:
        return 0.0
    best = 0.0
    acc = np.empty_like(xs)
    for t in ts:
        acc.fill(0.0)
        for c, w in zip(offsets, coeffs):
            acc += w * piecewise_eval(xs + c * t, knots, slope, intercept)
        row = float(np.max(np.abs(acc), initial=0.0))
        if row > best:
            best = row
    return best
