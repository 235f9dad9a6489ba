"""Mean-value (Steklov) machinery: two-parameter differences, the
integral representation, the integral factorization, the remainder
decomposition, and the envelope bound for cell integrals.

The Steklov transform F(x, y) of a function is its mean value over
[x, y], extended by F(x, x) = f(x).  Moving both arguments of a
2k-th binomial difference at once smooths the ordinary difference by
one integration, which is what converts modulus bounds into bounds on
integrals and point values.
"""

from dataclasses import dataclass
from math import comb, factorial

from .errors import (
    InvalidArgumentError,
    InvalidLengthError,
    RequiresGenericPointError,
    RequiresNonPoleError,
    RequiresOscillationError,
    UnsupportedOrderError,
)
from .funcspace import (
    PiecewiseFunction,
    evaluate,
    is_oscillating,
    signed_integral,
)
from .rational import Rat, RatLike, ZERO, is_integer, rat, rat_float, rat_str

__all__ = [
    "CheckResult",
    "check_integer_point_identity",
    "check_integral_factorization",
    "check_integral_representation",
    "check_product_identity",
    "check_remainder_decomposition",
    "envelope",
    "integral_bound",
    "steklov",
    "steklov_remainder",
    "two_param_difference",
]


def _validate_half_order(k: int) -> None:
    if not isinstance(k, int) or k < 1:
        raise UnsupportedOrderError(
            f"half-order must be a positive integer, got {k!r}"
        )


def steklov(f: PiecewiseFunction, x: RatLike, y: RatLike) -> Rat:
    """Exact mean value of ``f`` over [x, y]; the diagonal returns the
    defined point value."""
    x, y = rat(x), rat(y)
    if x == y:
        return evaluate(f, x, "exact")
    return signed_integral(f, x, y) / (y - x)


def two_param_difference(
    f: PiecewiseFunction, k: int, h1: RatLike, h2: RatLike, x: RatLike, y: RatLike
) -> Rat:
    """Signed binomial difference of the mean-value transform, moving the
    left argument by steps of h1 and the right argument by steps of h2."""
    _validate_half_order(k)
    h1, h2, x, y = rat(h1), rat(h2), rat(x), rat(y)
    total = ZERO
    for j in range(2 * k + 1):
        sign = 1 if j % 2 == 0 else -1
        total += sign * comb(2 * k, j) * steklov(
            f, x + (j - k) * h1, y + (j - k) * h2
        )
    return total


@dataclass(frozen=True)
class CheckResult:
    """Verdict record of one exact identity check."""

    query: dict
    lhs: Rat
    rhs: Rat
    equal: bool

    def to_json(self) -> dict:
        return {
            "query": dict(self.query),
            "lhs": rat_str(self.lhs),
            "rhs": rat_str(self.rhs),
            "lhs_float": rat_float(self.lhs),
            "rhs_float": rat_float(self.rhs),
            "equal": self.equal,
        }


def check_integral_representation(
    f: PiecewiseFunction, k: int, h1: RatLike, h2: RatLike, x: RatLike, y: RatLike
) -> CheckResult:
    """Compare the two-parameter difference against its t-integral form.

    The right side integrates the ordinary central difference along the
    straight path from (center x, step h1) to (center y, step h2).  Each
    node argument is affine in t, so the integrand is piecewise affine
    with kinks only where a node crosses a feature; the integral is the
    exact sum of midpoint values times segment lengths.  A node that
    stands still on a jump or spike makes the comparison depend on a
    measure-zero value, so such queries are rejected.
    """
    _validate_half_order(k)
    h1, h2, x, y = rat(h1), rat(h2), rat(x), rat(y)
    features = f.feature_positions
    feature_set = set(features)

    starts = [x + (j - k) * h1 for j in range(2 * k + 1)]
    speeds = [(y - x) + (j - k) * (h2 - h1) for j in range(2 * k + 1)]
    for j in range(2 * k + 1):
        if speeds[j] == 0 and starts[j] in feature_set:
            raise RequiresGenericPointError(
                f"node {j} stands on the feature at {rat_str(starts[j])}; "
                "perturb the query"
            )

    cuts = {ZERO, rat(1)}
    for j in range(2 * k + 1):
        if speeds[j] == 0:
            continue
        for p in features:
            t = (p - starts[j]) / speeds[j]
            if 0 < t < 1:
                cuts.add(t)
    grid = sorted(cuts)

    signs = [1 if j % 2 == 0 else -1 for j in range(2 * k + 1)]
    weights = [signs[j] * comb(2 * k, j) for j in range(2 * k + 1)]
    rhs = ZERO
    for a, b in zip(grid, grid[1:]):
        mid = (a + b) / 2
        value = ZERO
        for j in range(2 * k + 1):
            value += weights[j] * evaluate(f, starts[j] + mid * speeds[j], "exact")
        rhs += (b - a) * value

    lhs = two_param_difference(f, k, h1, h2, x, y)
    return CheckResult(
        query={
            "check": "integral-representation",
            "k": k,
            "h1": rat_str(h1),
            "h2": rat_str(h2),
            "x": rat_str(x),
            "y": rat_str(y),
        },
        lhs=lhs,
        rhs=rhs,
        equal=lhs == rhs,
    )


def check_integral_factorization(
    f: PiecewiseFunction, k: int, x: RatLike
) -> CheckResult:
    """Compare the integral of ``f`` from 0 to x against the closed-form
    product prefactor times a two-parameter difference.

    Requires the zero-integral condition at unit scale.  Integer x in
    [-k, k] zero the prefactor while a mean-value term degenerates to a
    point value, so those queries are rejected as poles.
    """
    _validate_half_order(k)
    x = rat(x)
    if is_integer(x) and -k <= x <= k:
        raise RequiresNonPoleError(
            f"x = {rat_str(x)} is a pole of the factorization; "
            "integer points have their own identity"
        )
    if not is_oscillating(f, 1):
        raise RequiresOscillationError(
            "the factorization needs zero integrals over unit cells"
        )
    lhs = signed_integral(f, ZERO, x)
    prefactor = rat(1, factorial(2 * k))
    for i in range(-k, k + 1):
        prefactor *= x + i
    rhs = prefactor * two_param_difference(f, k, 1, 0, 0, x)
    return CheckResult(
        query={"check": "integral-factorization", "k": k, "x": rat_str(x)},
        lhs=lhs,
        rhs=rhs,
        equal=lhs == rhs,
    )


def steklov_remainder(f: PiecewiseFunction, k: int, x: RatLike) -> Rat:
    """The off-center part of the unit-step mean-value difference at x:
    sum over i != 0 of (-1)^(k-i) binom(2k, k+i) F(x, x+i)."""
    _validate_half_order(k)
    x = rat(x)
    total = ZERO
    for i in range(-k, k + 1):
        if i == 0:
            continue
        sign = 1 if (k - i) % 2 == 0 else -1
        total += sign * comb(2 * k, k + i) * steklov(f, x, x + i)
    return total


def check_remainder_decomposition(
    f: PiecewiseFunction, k: int, x: RatLike
) -> CheckResult:
    """The unit-step mean-value difference splits exactly into the center
    term (+-binom(2k,k) f(x)) plus the remainder."""
    _validate_half_order(k)
    x = rat(x)
    lhs = two_param_difference(f, k, 0, 1, x, x)
    center = comb(2 * k, k) * evaluate(f, x, "exact")
    if k % 2 == 1:
        center = -center
    rhs = center + steklov_remainder(f, k, x)
    return CheckResult(
        query={"check": "remainder-decomposition", "k": k, "x": rat_str(x)},
        lhs=lhs,
        rhs=rhs,
        equal=lhs == rhs,
    )


def check_integer_point_identity(
    f: PiecewiseFunction, k: int, j: int
) -> CheckResult:
    """At integer points of a zero-integral function the remainder terms
    vanish, leaving |difference| = binom(2k,k) |f(j)|."""
    _validate_half_order(k)
    if not isinstance(j, int):
        raise InvalidArgumentError(f"integer point expected, got {j!r}")
    if not is_oscillating(f, 1):
        raise RequiresOscillationError(
            "the integer-point identity needs zero integrals over unit cells"
        )
    lhs = abs(two_param_difference(f, k, 0, 1, j, j))
    rhs = comb(2 * k, k) * abs(evaluate(f, j, "exact"))
    return CheckResult(
        query={"check": "integer-point", "k": k, "j": j},
        lhs=lhs,
        rhs=rhs,
        equal=lhs == rhs,
    )


def envelope(x: RatLike, k: int) -> Rat:
    """The odd polynomial x * prod_{j=1..k} (1 - x^2/j^2) / binom(2k, k)
    bounding integrals of unit-modulus zero-integral functions."""
    _validate_half_order(k)
    x = rat(x)
    value = x
    for j in range(1, k + 1):
        value *= 1 - (x * x) / (j * j)
    return value / comb(2 * k, k)


def check_product_identity(x: RatLike, k: int) -> CheckResult:
    """|prod_{i=-k..k} (x+i)| / (2k)! equals |envelope(x, k)| exactly."""
    _validate_half_order(k)
    x = rat(x)
    product = rat(1, factorial(2 * k))
    for i in range(-k, k + 1):
        product *= x + i
    lhs = abs(product)
    rhs = abs(envelope(x, k))
    return CheckResult(
        query={"check": "product-identity", "k": k, "x": rat_str(x)},
        lhs=lhs,
        rhs=rhs,
        equal=lhs == rhs,
    )


def integral_bound(y: RatLike, k: int) -> Rat:
    """Bound on |integral of f over [j, j+y]| for zero-integral functions
    with unit relaxed strip maximum; the complement length is used when
    it gives the smaller envelope value."""
    _validate_half_order(k)
    y = rat(y)
    if not (0 <= y <= 1):
        raise InvalidLengthError(
            f"sub-cell length must lie in [0, 1], got {rat_str(y)}"
        )
    return min(abs(envelope(y, k)), abs(envelope(1 - y, k)))
