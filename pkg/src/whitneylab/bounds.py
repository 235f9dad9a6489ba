"""Closed-form bounds for the oscillating-function norm/modulus ratio.

Everything here is elementary arithmetic: harmonic numbers, central
binomial coefficients, and two explicit step-construction estimates for
order 2 whose combination gives the refined upper bound.
"""

from dataclasses import dataclass
from math import comb

from .errors import InvalidRangeError, UnsupportedOrderError
from .rational import Rat, rat, rat_float, rat_str

__all__ = [
    "BoundPair",
    "BoundScan",
    "CombinedBound",
    "bounds_table",
    "central_binomial",
    "combined_upper_bound",
    "harmonic",
    "shrunk_step_bound",
    "shrunk_step_one_sided_term",
    "unit_step_bound",
    "upper_bound_scan",
    "whitney2_bounds",
    "whitney_bounds",
]


def _validate_order_index(k: int) -> None:
    if not isinstance(k, int) or k < 1:
        raise UnsupportedOrderError(
            f"half-order must be a positive integer, got {k!r}"
        )


def harmonic(k: int) -> Rat:
    """Exact k-th harmonic number; harmonic(0) = 0."""
    if not isinstance(k, int) or k < 0:
        raise UnsupportedOrderError(f"harmonic index must be >= 0, got {k!r}")
    total = rat(0)
    for j in range(1, k + 1):
        total += rat(1, j)
    return total


def central_binomial(k: int) -> int:
    """binom(2k, k), the normalizing constant of the order-2k ratio."""
    _validate_order_index(k)
    return comb(2 * k, k)


@dataclass(frozen=True)
class BoundPair:
    """Proven lower and upper bounds for a norm/modulus ratio constant."""

    lower: Rat
    upper: Rat

    def to_json(self) -> dict:
        return {
            "lower": rat_str(self.lower),
            "upper": rat_str(self.upper),
            "lower_float": rat_float(self.lower),
            "upper_float": rat_float(self.upper),
        }


def whitney_bounds(k: int) -> BoundPair:
    """General bounds for the order-2k constant.

    The lower bound 1/binom(2k, k) is attained in the limit by a single
    spike; the upper bound (1 + harmonic(k))/binom(2k, k) comes from the
    averaged finite-difference representation of the function value.
    """
    _validate_order_index(k)
    binom = central_binomial(k)
    return BoundPair(lower=rat(1, binom), upper=(1 + harmonic(k)) / binom)


def whitney2_bounds() -> BoundPair:
    """Sharper order-2 bounds: 43/74 from the shipped extremal geometry
    and 5/8 from the step constructions below."""
    return BoundPair(lower=rat(43, 74), upper=rat(5, 8))


def unit_step_bound(x) -> Rat:
    """Order-2 bound 1/2 + x(1 - x^2)/2 when the norm point sits at
    offset x in (0, 1/2] from the nearest unit-lattice point."""
    x = rat(x)
    if not (0 < x <= rat(1, 2)):
        raise InvalidRangeError(
            f"offset must lie in (0, 1/2], got {rat_str(x)}"
        )
    return rat(1, 2) + x * (1 - x * x) / 2


def shrunk_step_bound(x) -> Rat:
    """Order-2 bound 1/2 + x(1 - 2x), from a step of shrunk width, valid
    for offsets x in [1/4, 1/2]."""
    x = rat(x)
    if not (rat(1, 4) <= x <= rat(1, 2)):
        raise InvalidRangeError(
            f"offset must lie in [1/4, 1/2], got {rat_str(x)}"
        )
    return rat(1, 2) + x * (1 - 2 * x)


def shrunk_step_one_sided_term(x) -> Rat:
    """Magnitude of the pre-halving correction term in the shrunk-step
    estimate, |(2x - 1) * 2x * (2x + 1) / (2(1 - x))|."""
    x = rat(x)
    if not (rat(1, 4) <= x <= rat(1, 2)):
        raise InvalidRangeError(
            f"offset must lie in [1/4, 1/2], got {rat_str(x)}"
        )
    return abs((2 * x - 1) * 2 * x * (2 * x + 1) / (2 * (1 - x)))


def _pointwise_bound(x: Rat) -> Rat:
    """Best available bound at a single norm offset."""
    best = unit_step_bound(x)
    if x >= rat(1, 4):
        other = shrunk_step_bound(x)
        if other < best:
            best = other
    return best


@dataclass(frozen=True)
class CombinedBound:
    """Crossing point of the two step estimates and the bound value there."""

    x0: float
    value: float

    def to_json(self) -> dict:
        from .rational import format_float

        return {"x0": format_float(self.x0), "value": format_float(self.value)}


def combined_upper_bound() -> CombinedBound:
    """Refined order-2 upper bound.

    The unit-step estimate increases with the offset while the shrunk-step
    estimate decreases, so the worst offset is their crossing; bisection
    on the difference locates it.  The crossing solves x^2 - 4x + 1 = 0.
    """

    def gap(x: float) -> float:
        a = 0.5 + x * (1.0 - x * x) / 2.0
        b = 0.5 + x * (1.0 - 2.0 * x)
        return a - b

    lo, hi = 0.25, 0.5
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if gap(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    x0 = (lo + hi) / 2.0
    value = 0.5 + x0 * (1.0 - x0 * x0) / 2.0
    return CombinedBound(x0=x0, value=value)


@dataclass(frozen=True)
class BoundScan:
    """Worst pointwise bound over a scan of norm offsets."""

    value: Rat
    argmax: Rat
    samples: int

    def to_json(self) -> dict:
        return {
            "value": rat_str(self.value),
            "value_float": rat_float(self.value),
            "argmax": rat_str(self.argmax),
            "samples": self.samples,
        }


def upper_bound_scan(n: int) -> BoundScan:
    """Evaluate the best pointwise bound on an n-point offset grid and
    return the worst case; it never exceeds 5/8."""
    if not isinstance(n, int) or n < 1:
        raise InvalidRangeError(f"sample count must be >= 1, got {n!r}")
    best_value = None
    best_x = None
    for i in range(1, n + 1):
        x = rat(i, 2 * n)
        value = _pointwise_bound(x)
        if best_value is None or value > best_value:
            best_value = value
            best_x = x
    return BoundScan(value=best_value, argmax=best_x, samples=n)


def bounds_table(kmax: int) -> list:
    """Rows (k, lower, upper) of whitney_bounds for k = 1..kmax."""
    _validate_order_index(kmax)
    rows = []
    for k in range(1, kmax + 1):
        pair = whitney_bounds(k)
        rows.append((k, pair.lower, pair.upper))
    return rows
