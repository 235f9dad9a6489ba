"""Exact rational scalars shared by every module.

Every certified quantity in this package (function values, integrals,
moduli, ratios, linear-program rows) is an arbitrary-precision rational.
Floats appear only in the sampling oracle, in report rendering and inside
the simplex tableau, and they never flow back into a certified value
without an explicit ``rational_from_float`` call.

``gmpy2.mpq`` is used when importable; it is several times faster than
``fractions.Fraction`` on the arrangement sweeps and hash-compatible with
it.  The portable fallback is ``fractions.Fraction``.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Union

try:
    from gmpy2 import mpq as Rat

    BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Rat = Fraction
    BACKEND = "fractions"

#: Types accepted by :func:`rat`.
RatLike = Union[int, str, Fraction, numbers.Rational]

ZERO = Rat(0)
ONE = Rat(1)


def rat(value: RatLike, denominator: RatLike = None) -> Rat:
    """Coerce ``value`` to an exact rational.

    Accepts ints, ``"p/q"`` / ``"p"`` strings, ``Fraction`` and backend
    rationals.  ``rat(p, q)`` builds the quotient p/q.  Floats are refused:
    they are almost always an accident in exact code, and the one sanctioned
    float entry point is :func:`rational_from_float`.
    """
    if denominator is not None:
        num = rat(value)
        den = rat(denominator)
        if den == 0:
            raise ZeroDivisionError("rational with zero denominator")
        return num / den
    if isinstance(value, float):
        raise TypeError(
            "floats are inexact; pass a string, int or Fraction "
            "(or use rational_from_float explicitly)"
        )
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            top, _, bottom = text.partition("/")
            return Rat(int(top.strip()), int(bottom.strip()))
        return Rat(int(text))
    if isinstance(value, (int, numbers.Rational)):
        return Rat(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rat_str(value: RatLike) -> str:
    """Render as the canonical ``"p/q"`` string used in every file format."""
    q = rat(value)
    return f"{q.numerator}/{q.denominator}"


def rat_float(value: RatLike) -> float:
    """Nearest float, for reports only."""
    return float(rat(value))


def rat_floor(value: RatLike) -> int:
    q = rat(value)
    return int(q.numerator // q.denominator)


def rat_ceil(value: RatLike) -> int:
    return -rat_floor(-rat(value))


def is_integer(value: RatLike) -> bool:
    return rat(value).denominator == 1


def rational_from_float(x: float, max_denominator: int = 10**6) -> Rat:
    """Snap a float to a nearby small-denominator rational.

    This is the single sanctioned float-to-rational crossing, used when a
    floating linear-program solution is promoted to an exact candidate
    before certification.
    """
    return Rat(Fraction(x).limit_denominator(max_denominator))


def format_float(x: float) -> str:
    """15-significant-digit rendering used by the command line reports."""
    return f"{x:.15g}"
