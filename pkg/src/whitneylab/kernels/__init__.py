"""Backend selection for the grid-sampling core.

The compiled extension is preferred when it imported cleanly; otherwise
the numpy fallback is used.  Both expose the same two functions and are
tested against each other, so the choice never changes results beyond
float rounding order.
"""

import numpy as np

from . import _gridcore_py as _pure

try:
    from . import _gridcore as _compiled

    KERNEL_BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on how the wheel was built
    _compiled = None
    KERNEL_BACKEND = "python"

_impl = _compiled if _compiled is not None else _pure

from ..rational import rat_float


def available_backends():
    return ("compiled", "python") if _compiled is not None else ("python",)


def _backend_module(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pure
    if backend == "compiled":
        if _compiled is None:
            raise ValueError("compiled kernel backend is not available in this build")
        return _compiled
    raise ValueError(f"unknown kernel backend {backend!r}")


def segments_from_function(f):
    """Float knot/slope/intercept arrays for a piecewise function.

    Spikes are invisible to the sampling oracle: they live on a measure-zero
    set and generic sample points never hit them.
    """
    knots = np.array([rat_float(b.position) for b in f.breakpoints], dtype=np.float64)
    n = len(knots)
    slope = np.zeros(max(n - 1, 0), dtype=np.float64)
    intercept = np.zeros(max(n - 1, 0), dtype=np.float64)
    for i in range(n - 1):
        b0 = f.breakpoints[i]
        b1 = f.breakpoints[i + 1]
        s = (b1.left_limit - b0.right_value) / (b1.position - b0.position)
        slope[i] = rat_float(s)
        intercept[i] = rat_float(b0.right_value - s * b0.position)
    return knots, slope, intercept


def _as_arrays(*chunks):
    return tuple(np.ascontiguousarray(c, dtype=np.float64) for c in chunks)


def grid_max_abs_difference(xs, ts, offsets, coeffs, knots, slope, intercept, backend=None):
    """max over the (xs x ts) lattice of |sum_j coeffs[j] f(x + offsets[j] t)|."""
    impl = _backend_module(backend)
    args = _as_arrays(xs, ts, offsets, coeffs, knots, slope, intercept)
    return float(impl.grid_max_abs_difference(*args))


def piecewise_eval(qs, knots, slope, intercept, backend=None):
    """Point evaluation through the selected (or named) backend."""
    impl = _backend_module(backend)
    args = _as_arrays(qs, knots, slope, intercept)
    return np.asarray(impl.piecewise_eval(*args))
