"""Compactly supported piecewise-linear functions with jumps and spikes.

The model class behind every computation in this package.  A function is

* zero outside the convex hull of its feature positions,
* affine between consecutive breakpoints,
* right-continuous at breakpoints: the defined value at a breakpoint is
  its ``right_value``, while ``left_limit`` records the limit from below,
* optionally modified on a finite set of extra points ("spikes") whose
  defined value differs from the surrounding segment.

All coordinates and values are exact rationals (see :mod:`.rational`).
Two functions that agree pointwise have identical normalized
representations, so ``==`` is semantic equality.

The interchange format is JSON::

    {"breakpoints": [{"x": "p/q", "left": "p/q", "right": "p/q"}, ...],
     "spikes": [{"x": "p/q", "value": "p/q"}]}

The writer always emits the sorted normalized form.  The reader rejects
structural violations (unsorted or duplicate positions, nonzero boundary
values, a spike sitting on a breakpoint) with a message naming the
offending entry; redundancy (collinear interior breakpoints, spikes equal
to the interpolated value) is normalized away silently because it does
not corrupt the function, it merely over-describes it.
"""

from __future__ import annotations

import json
import random
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .errors import (
    DegenerateInputError,
    FunctionFormatError,
    InvalidArgumentError,
    InvalidRangeError,
    InvalidScaleError,
)
from .rational import Rat, RatLike, ZERO, rat, rat_float, rat_str, rat_floor, rat_ceil

SIDES = ("below", "exact", "above")


@dataclass(frozen=True)
class Breakpoint:
    """A node of the piecewise-affine structure.

    ``left_limit`` is the limit of the function from below; ``right_value``
    is both the defined value at ``position`` and the start of the affine
    segment to the right.
    """

    position: Rat
    left_limit: Rat
    right_value: Rat


@dataclass(frozen=True)
class Spike:
    """A point where the defined value differs from the segment through it."""

    position: Rat
    value: Rat


@dataclass(frozen=True)
class PiecewiseFunction:
    breakpoints: tuple
    spikes: tuple

    # -- structural helpers -------------------------------------------------

    @cached_property
    def positions(self) -> tuple:
        return tuple(b.position for b in self.breakpoints)

    @cached_property
    def spike_map(self) -> dict:
        return {s.position: s.value for s in self.spikes}

    @cached_property
    def feature_positions(self) -> tuple:
        """All positions where the function's description changes, sorted."""
        return tuple(sorted(self.positions + tuple(s.position for s in self.spikes)))

    @property
    def is_zero(self) -> bool:
        return not self.breakpoints and not self.spikes

    def support(self) -> Optional[tuple]:
        """Hull of the feature positions, or None for the zero function."""
        feats = self.feature_positions
        if not feats:
            return None
        return (feats[0], feats[-1])

    def __call__(self, x: RatLike, side: str = "exact") -> Rat:
        return evaluate(self, x, side)


class SupNorm(NamedTuple):
    value: Rat
    position: Optional[Rat]


PointLike = Union[Breakpoint, Sequence]
SpikeLike = Union[Spike, Sequence]


def _chord_hits(p0, v0, p1, v1, p2, v2) -> bool:
    """True when (p1, v1) lies on the segment from (p0, v0) to (p2, v2)."""
    return (v1 - v0) * (p2 - p0) == (v2 - v0) * (p1 - p0)


def build(points: Iterable[PointLike] = (), spikes: Iterable[SpikeLike] = ()) -> PiecewiseFunction:
    """Construct a normalized function from raw breakpoint and spike data.

    ``points`` entries are ``Breakpoint`` or ``(position, left, right)``;
    ``spikes`` entries are ``Spike`` or ``(position, value)``.  Input may be
    unsorted; violations of the structural invariants raise
    :class:`FunctionFormatError` with the offending position.
    """
    bps = []
    for entry in points:
        if isinstance(entry, Breakpoint):
            bps.append(Breakpoint(rat(entry.position), rat(entry.left_limit), rat(entry.right_value)))
        else:
            p, l, r = entry
            bps.append(Breakpoint(rat(p), rat(l), rat(r)))
    bps.sort(key=lambda b: b.position)

    for i in range(1, len(bps)):
        if bps[i].position == bps[i - 1].position:
            raise FunctionFormatError(
                f"duplicate breakpoint position {rat_str(bps[i].position)}"
            )
    if bps:
        if bps[0].left_limit != 0:
            raise FunctionFormatError(
                f"first breakpoint (x={rat_str(bps[0].position)}) must have left limit 0, "
                f"got {rat_str(bps[0].left_limit)}"
            )
        if bps[-1].right_value != 0:
            raise FunctionFormatError(
                f"last breakpoint (x={rat_str(bps[-1].position)}) must have right value 0, "
                f"got {rat_str(bps[-1].right_value)}"
            )

    # Drop interior breakpoints that the neighbouring segments already
    # describe.  A single left-to-right pass with a stack handles chains.
    if len(bps) > 2:
        kept = [bps[0]]
        for nxt in bps[1:]:
            while len(kept) >= 2:
                mid, prev = kept[-1], kept[-2]
                if mid.left_limit == mid.right_value and _chord_hits(
                    prev.position, prev.right_value,
                    mid.position, mid.right_value,
                    nxt.position, nxt.left_limit,
                ):
                    kept.pop()
                else:
                    break
            kept.append(nxt)
        bps = kept

    # Trim zero segments at the ends, then a lone all-zero node.
    while len(bps) >= 2 and bps[0].left_limit == 0 and bps[0].right_value == 0 \
            and bps[1].left_limit == 0:
        bps = bps[1:]
    while len(bps) >= 2 and bps[-1].right_value == 0 and bps[-1].left_limit == 0 \
            and bps[-2].right_value == 0:
        bps = bps[:-1]
    if len(bps) == 1 and bps[0].left_limit == 0 and bps[0].right_value == 0:
        bps = []

    fn = PiecewiseFunction(tuple(bps), ())

    sps = []
    for entry in spikes:
        if isinstance(entry, Spike):
            sps.append(Spike(rat(entry.position), rat(entry.value)))
        else:
            p, v = entry
            sps.append(Spike(rat(p), rat(v)))
    sps.sort(key=lambda s: s.position)
    position_set = set(fn.positions)
    kept_spikes = []
    for i, s in enumerate(sps):
        if i > 0 and s.position == sps[i - 1].position:
            raise FunctionFormatError(f"duplicate spike position {rat_str(s.position)}")
        if s.position in position_set:
            raise FunctionFormatError(
                f"spike at x={rat_str(s.position)} coincides with a breakpoint"
            )
        if s.value != evaluate(fn, s.position, "exact"):
            kept_spikes.append(s)

    return PiecewiseFunction(tuple(bps), tuple(kept_spikes))


# -- evaluation --------------------------------------------------------------


def evaluate(f: PiecewiseFunction, x: RatLike, side: str = "exact") -> Rat:
    """Value of ``f`` at ``x`` from the requested side.

    ``"exact"`` is the defined value (spikes included), ``"below"`` and
    ``"above"`` are one-sided limits, which never see spikes.
    """
    if side not in SIDES:
        raise InvalidArgumentError(f"side must be one of {SIDES}, got {side!r}")
    x = rat(x)
    if side == "exact":
        hit = f.spike_map.get(x)
        if hit is not None:
            return hit
    P = f.positions
    n = len(P)
    if n == 0 or x < P[0] or x > P[-1]:
        return ZERO
    i = bisect_right(P, x) - 1
    b = f.breakpoints[i]
    if x == b.position:
        return b.left_limit if side == "below" else b.right_value
    return _interpolate(f, i, x)


def evaluate_triple(f: PiecewiseFunction, x: RatLike) -> tuple:
    """``(below, exact, above)`` at ``x`` with a single position lookup."""
    x = rat(x)
    P = f.positions
    n = len(P)
    if n == 0 or x < P[0] or x > P[-1]:
        base = ZERO
        below = exact = above = base
    else:
        i = bisect_right(P, x) - 1
        b = f.breakpoints[i]
        if x == b.position:
            below, exact, above = b.left_limit, b.right_value, b.right_value
        else:
            v = _interpolate(f, i, x)
            below = exact = above = v
    hit = f.spike_map.get(x)
    if hit is not None:
        exact = hit
    return (below, exact, above)


def _interpolate(f: PiecewiseFunction, i: int, x: Rat) -> Rat:
    b0 = f.breakpoints[i]
    b1 = f.breakpoints[i + 1]
    t = (x - b0.position) / (b1.position - b0.position)
    return b0.right_value + t * (b1.left_limit - b0.right_value)


# -- integration and norms ---------------------------------------------------


def definite_integral(f: PiecewiseFunction, a: RatLike, b: RatLike) -> Rat:
    """Exact integral of ``f`` over ``[a, b]``; requires ``a <= b``."""
    a, b = rat(a), rat(b)
    if a > b:
        raise InvalidRangeError(f"integration range has a > b: {rat_str(a)} > {rat_str(b)}")
    P = f.positions
    if not P:
        return ZERO
    lo = max(a, P[0])
    hi = min(b, P[-1])
    if lo >= hi:
        return ZERO
    total = ZERO
    i = max(bisect_right(P, lo) - 1, 0)
    while i < len(P) - 1 and P[i] < hi:
        seg_lo = max(lo, P[i])
        seg_hi = min(hi, P[i + 1])
        if seg_lo < seg_hi:
            b0 = f.breakpoints[i]
            b1 = f.breakpoints[i + 1]
            slope = (b1.left_limit - b0.right_value) / (b1.position - b0.position)
            v_lo = b0.right_value + slope * (seg_lo - b0.position)
            v_hi = b0.right_value + slope * (seg_hi - b0.position)
            total += (seg_hi - seg_lo) * (v_lo + v_hi) / 2
        i += 1
    return total


def signed_integral(f: PiecewiseFunction, a: RatLike, b: RatLike) -> Rat:
    """Oriented integral: negates when ``a > b``."""
    a, b = rat(a), rat(b)
    if a <= b:
        return definite_integral(f, a, b)
    return -definite_integral(f, b, a)


def sup_norm(f: PiecewiseFunction) -> SupNorm:
    """Exact maximum of ``|f|`` and the smallest abscissa attaining it.

    The maximum of a piecewise-affine function over a segment sits at a
    feature position, so scanning features in increasing position order
    finds both the value and its first witness.
    """
    best = ZERO
    where: Optional[Rat] = None
    events = [(b.position, (abs(b.left_limit), abs(b.right_value))) for b in f.breakpoints]
    events += [(s.position, (abs(s.value),)) for s in f.spikes]
    events.sort(key=lambda e: e[0])
    for pos, values in events:
        for v in values:
            if v > best:
                best = v
                where = pos
    return SupNorm(best, where)


# -- arithmetic --------------------------------------------------------------


def translate(f: PiecewiseFunction, dx: RatLike) -> PiecewiseFunction:
    """The function ``x -> f(x - dx)``."""
    dx = rat(dx)
    return PiecewiseFunction(
        tuple(Breakpoint(b.position + dx, b.left_limit, b.right_value) for b in f.breakpoints),
        tuple(Spike(s.position + dx, s.value) for s in f.spikes),
    )


def scale_values(f: PiecewiseFunction, c: RatLike) -> PiecewiseFunction:
    """The function ``c * f``."""
    c = rat(c)
    return build(
        [(b.position, c * b.left_limit, c * b.right_value) for b in f.breakpoints],
        [(s.position, c * s.value) for s in f.spikes],
    )


def add(f: PiecewiseFunction, g: PiecewiseFunction) -> PiecewiseFunction:
    """Pointwise sum.

    Raises :class:`DegenerateInputError` when the sum would need a spike
    at a breakpoint of the result (a defined value differing from the
    right limit at a jump or kink), which this model cannot represent.
    """
    union = sorted(set(f.positions) | set(g.positions))
    points = []
    for p in union:
        points.append((
            p,
            evaluate(f, p, "below") + evaluate(g, p, "below"),
            evaluate(f, p, "above") + evaluate(g, p, "above"),
        ))
    base = build(points)
    spikes = []
    for p in sorted(set(f.spike_map) | set(g.spike_map)):
        if p in set(base.positions):
            raise DegenerateInputError(
                f"sum would place a spike on a breakpoint at x={rat_str(p)}"
            )
        spikes.append((p, evaluate(f, p, "exact") + evaluate(g, p, "exact")))
    return build(points, spikes)


# -- the mean-zero (oscillation) structure -----------------------------------


def _grid_range(f: PiecewiseFunction, h: Rat) -> tuple:
    """Indices [j_lo, j_hi) of grid intervals [j*h, (j+1)*h] meeting the support."""
    span = f.support()
    if span is None:
        return (0, 0)
    lo, hi = span
    return (rat_floor(lo / h), rat_ceil(hi / h))


def check_oscillation(f: PiecewiseFunction, h: RatLike) -> list:
    """Exact integrals of ``f`` over every grid interval meeting its support.

    Returns ``[(j, integral), ...]`` for intervals ``[j*h, (j+1)*h]``.  The
    function has zero mean on every grid interval of step ``h`` exactly
    when all returned integrals vanish (outside the support they are
    trivially zero).
    """
    h = rat(h)
    if h <= 0:
        raise InvalidScaleError(f"grid step must be positive, got {rat_str(h)}")
    j_lo, j_hi = _grid_range(f, h)
    return [(j, definite_integral(f, j * h, (j + 1) * h)) for j in range(j_lo, j_hi)]


def oscillation_violations(f: PiecewiseFunction, h: RatLike) -> list:
    return [(j, v) for (j, v) in check_oscillation(f, h) if v != 0]


def is_oscillating(f: PiecewiseFunction, h: RatLike) -> bool:
    return not oscillation_violations(f, h)


def make_oscillating(f: PiecewiseFunction, h: RatLike) -> PiecewiseFunction:
    """Subtract the grid-interval means so every interval integrates to zero.

    Already-compliant input is returned unchanged (the same object).  The
    construction introduces breakpoints on the grid lines; if a spike of
    ``f`` sits on a grid line where the subtracted means jump, the result
    would need a spike on a breakpoint and :class:`DegenerateInputError`
    is raised.
    """
    h = rat(h)
    if h <= 0:
        raise InvalidScaleError(f"grid step must be positive, got {rat_str(h)}")
    integrals = check_oscillation(f, h)
    if all(v == 0 for (_, v) in integrals):
        return f
    means = {j: v / h for (j, v) in integrals}

    def mean_below(p: Rat) -> Rat:
        j = rat_floor(p / h)
        if p == j * h:
            j -= 1
        return means.get(j, ZERO)

    def mean_above(p: Rat) -> Rat:
        return means.get(rat_floor(p / h), ZERO)

    j_lo, j_hi = _grid_range(f, h)
    grid = [j * h for j in range(j_lo, j_hi + 1)]
    new_positions = sorted(set(f.positions) | set(grid))
    points = [
        (p, evaluate(f, p, "below") - mean_below(p), evaluate(f, p, "above") - mean_above(p))
        for p in new_positions
    ]
    base = build(points)
    base_positions = set(base.positions)
    spikes = []
    for s in f.spikes:
        if s.position in base_positions:
            raise DegenerateInputError(
                f"spike at x={rat_str(s.position)} lands on a grid breakpoint "
                "after mean subtraction"
            )
        spikes.append((s.position, s.value - mean_above(s.position)))
    return build(points, spikes)


# -- stock functions ---------------------------------------------------------


def extremal_example() -> PiecewiseFunction:
    """The shipped near-extremal function: mean-zero on unit intervals of
    [-1, 2], sup norm 43/74 attained by the spike at 1/4."""
    return build(
        [
            ("-1", 0, "-12/37"),
            ("-1/2", "-6/37", "12/37"),
            ("1", "-6/37", "12/37"),
            ("5/4", "15/37", "-10/37"),
            ("3/2", "-1/37", "-1/37"),
            ("2", "-7/37", 0),
        ],
        [("1/4", "43/74")],
    )


def spike_function(position: RatLike, value: RatLike) -> PiecewiseFunction:
    """Zero everywhere except a single defined value at ``position``.

    Has zero mean on every grid for every step, and is the classical
    witness for the lower bound on the Whitney ratio.
    """
    value = rat(value)
    if value == 0:
        raise DegenerateInputError("a spike of value 0 is the zero function")
    return build([], [(position, value)])


def random_oscillating(seed: int, h: RatLike, complexity: int = 2) -> PiecewiseFunction:
    """Deterministic pseudorandom function with zero mean on every grid
    interval of step ``h``.

    ``complexity`` scales the breakpoint count; values 1..4 are sensible.
    Breakpoints sit on a denominator-48 lattice and the optional spike on
    a denominator-97 lattice, so the spike can never collide with a
    breakpoint or a grid line.
    """
    h = rat(h)
    if h <= 0:
        raise InvalidScaleError(f"grid step must be positive, got {rat_str(h)}")
    if complexity < 1:
        raise InvalidArgumentError("complexity must be >= 1")
    rng = random.Random(seed)
    units = 1 + min(complexity, 3)
    width = units * h
    for _ in range(64):
        count = min(2 + 2 * complexity + rng.randint(0, 2), 12)
        lattice = rng.sample(range(1, 48), count)
        lattice.sort()

        def rnd_value() -> Rat:
            return rat(rng.randint(-24, 24), rng.randint(1, 6))

        points = [(ZERO, ZERO, rnd_value())]
        for i in lattice:
            p = width * rat(i, 48)
            left = rnd_value()
            right = left if rng.random() < 0.5 else rnd_value()
            points.append((p, left, right))
        points.append((width, rnd_value(), ZERO))

        spikes = []
        if complexity >= 2 and rng.random() < 0.7:
            s = width * rat(rng.randint(1, 96), 97)
            raw = build(points)
            delta = rat(rng.randint(1, 12), rng.randint(1, 4))
            if rng.random() < 0.5:
                delta = -delta
            spikes.append((s, evaluate(raw, s, "exact") + delta))

        candidate = make_oscillating(build(points, spikes), h)
        if not candidate.is_zero:
            return candidate
    raise DegenerateInputError(
        f"could not generate a nonzero oscillating function for seed {seed}"
    )


# -- interchange format ------------------------------------------------------


def function_to_json(f: PiecewiseFunction) -> dict:
    return {
        "breakpoints": [
            {"x": rat_str(b.position), "left": rat_str(b.left_limit), "right": rat_str(b.right_value)}
            for b in f.breakpoints
        ],
        "spikes": [{"x": rat_str(s.position), "value": rat_str(s.value)} for s in f.spikes],
    }


def _parse_rat_field(container: dict, key: str, where: str) -> Rat:
    if key not in container:
        raise FunctionFormatError(f"{where}: missing field {key!r}")
    try:
        return rat(container[key])
    except (TypeError, ValueError) as exc:
        raise FunctionFormatError(f"{where}: bad rational in field {key!r}: {exc}") from exc


def function_from_json(data: dict) -> PiecewiseFunction:
    """Parse and validate the interchange format.

    Ordering violations are rejected rather than repaired, so a file that
    round-trips unchanged is guaranteed to be in normalized form.
    """
    if not isinstance(data, dict):
        raise FunctionFormatError("function document must be a JSON object")
    unknown = set(data) - {"breakpoints", "spikes"}
    if unknown:
        raise FunctionFormatError(f"unknown keys in function document: {sorted(unknown)}")
    raw_bps = data.get("breakpoints", [])
    raw_sps = data.get("spikes", [])
    if not isinstance(raw_bps, list) or not isinstance(raw_sps, list):
        raise FunctionFormatError("breakpoints and spikes must be arrays")

    points = []
    for i, entry in enumerate(raw_bps):
        where = f"breakpoints[{i}]"
        if not isinstance(entry, dict):
            raise FunctionFormatError(f"{where}: expected an object")
        x = _parse_rat_field(entry, "x", where)
        left = _parse_rat_field(entry, "left", where)
        right = _parse_rat_field(entry, "right", where)
        if points and x <= points[-1][0]:
            raise FunctionFormatError(
                f"{where}: position {rat_str(x)} not increasing past {rat_str(points[-1][0])}"
            )
        points.append((x, left, right))

    spikes = []
    for i, entry in enumerate(raw_sps):
        where = f"spikes[{i}]"
        if not isinstance(entry, dict):
            raise FunctionFormatError(f"{where}: expected an object")
        x = _parse_rat_field(entry, "x", where)
        value = _parse_rat_field(entry, "value", where)
        if spikes and x <= spikes[-1][0]:
            raise FunctionFormatError(
                f"{where}: position {rat_str(x)} not increasing past {rat_str(spikes[-1][0])}"
            )
        spikes.append((x, value))

    return build(points, spikes)


def save_function(f: PiecewiseFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(function_to_json(f), fh, indent=2)
        fh.write("\n")


def load_function(path) -> PiecewiseFunction:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FunctionFormatError(f"{path}: not valid JSON: {exc}") from exc
    return function_from_json(data)
