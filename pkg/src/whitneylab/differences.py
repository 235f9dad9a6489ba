"""Even-order central differences and their exact maxima over a scale strip.

The central difference of order m at point x and step t reads the function
at the m+1 nodes x + (j - m/2) t.  Its supremum over x in R and 0 <= t <= h
is the modulus of smoothness that controls the Whitney-type comparisons in
this package.  For piecewise-linear functions that supremum is computed
*exactly*: the map (x, t) -> nodes is affine, so the difference is
piecewise-affine on the strip R x [0, h], its structure changing only on
the lines  x + (j - m/2) t = p  through the feature positions p of the
function.  The supremum is therefore attained (as a value or a limit) at a
vertex of this line arrangement, in one of finitely many one-sided
configurations.

Two maxima are offered:

* ``pointwise``: the literal supremum of |difference| over defined values,
  spikes included.
* ``relaxed``: the supremum over limit configurations; a spike value
  enters only while its node stays pinned on the spike line, i.e. through
  directional limits along that line.  This is the right notion for the
  averaging identities, which see the function only through integrals.

Every candidate configuration carries a per-node side selection (below /
exact / above), so a reported witness can be replayed through
:func:`central_difference` and must reproduce the value exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator, Optional, Sequence

import numpy as np

from . import kernels
from .errors import (
    DegenerateInputError,
    InvalidArgumentError,
    InvalidScaleError,
    RequiresOscillationError,
    UnsupportedOrderError,
)
from .funcspace import PiecewiseFunction, evaluate, evaluate_triple, is_oscillating, sup_norm
from .rational import Rat, RatLike, ZERO, rat, rat_float, rat_str

MODES = ("pointwise", "relaxed")

_SIDE_NAME = {-1: "below", 0: "exact", 1: "above"}
_SIDE_CODE = {"below": -1, "exact": 0, "above": 1}


@dataclass(frozen=True)
class DifferenceScheme:
    """Offsets and alternating binomial weights of the order-m difference."""

    order: int
    offsets: tuple
    coefficients: tuple

    @classmethod
    def of_order(cls, m: int) -> "DifferenceScheme":
        if not isinstance(m, int) or m < 1:
            raise InvalidArgumentError(f"difference order must be an integer >= 1, got {m!r}")
        offsets = tuple(rat(2 * j - m, 2) for j in range(m + 1))
        coefficients = tuple((-1) ** j * comb(m, j) for j in range(m + 1))
        return cls(m, offsets, coefficients)


def central_difference(
    f: PiecewiseFunction,
    m: int,
    t: RatLike,
    x: RatLike,
    sides: Optional[Sequence[str]] = None,
) -> Rat:
    """Exact order-m central difference of ``f`` at ``(x, t)``.

    ``sides`` selects a one-sided evaluation per node (default: defined
    values everywhere), which is how modulus witnesses are replayed.
    """
    scheme = DifferenceScheme.of_order(m)
    t, x = rat(t), rat(x)
    if sides is None:
        sides = ("exact",) * (m + 1)
    elif len(sides) != m + 1:
        raise InvalidArgumentError(
            f"need {m + 1} side selections for order {m}, got {len(sides)}"
        )
    total = ZERO
    for c, w, side in zip(scheme.offsets, scheme.coefficients, sides):
        total += w * evaluate(f, x + c * t, side)
    return total


# -- the critical line arrangement -------------------------------------------


@dataclass(frozen=True)
class Incidence:
    """One reason a vertex is critical: a node line through a feature, or
    the strip boundary."""

    kind: str  # "breakpoint" | "spike" | "strip-boundary"
    node: Optional[int]
    position: Rat


@dataclass(frozen=True)
class CriticalVertex:
    x: Rat
    t: Rat
    incident: tuple


def _feature_list(f: PiecewiseFunction) -> list:
    feats = [(b.position, "breakpoint") for b in f.breakpoints]
    feats += [(s.position, "spike") for s in f.spikes]
    feats.sort(key=lambda e: e[0])
    return feats


def _arrangement_vertices(features: Sequence, m: int, h: Rat) -> list:
    """Vertices of the node-line arrangement restricted to the strip.

    ``features`` is a sorted list of (position, kind).  Includes every
    pairwise line crossing inside the strip plus every line's entry and
    exit points on the strip boundary, restricted to the x-window
    [min - m*h, max + m*h].
    """
    if not features:
        return []
    scheme = DifferenceScheme.of_order(m)
    offsets = scheme.offsets
    feature_map = dict(features)
    positions = [p for p, _ in features]
    window_lo = positions[0] - m * h
    window_hi = positions[-1] + m * h

    points = set()
    lines = [(c, p) for c in offsets for p in positions]
    for a in range(len(lines)):
        c1, p1 = lines[a]
        for b in range(a + 1, len(lines)):
            c2, p2 = lines[b]
            if c1 == c2:
                continue
            t = (p1 - p2) / (c1 - c2)
            if t < 0 or t > h:
                continue
            x = p1 - c1 * t
            if window_lo <= x <= window_hi:
                points.add((x, t))
    for c, p in lines:
        points.add((p, ZERO))
        x_top = p - c * h
        if window_lo <= x_top <= window_hi:
            points.add((x_top, h))

    vertices = []
    for x, t in sorted(points):
        incident = []
        for j, c in enumerate(offsets):
            arg = x + c * t
            kind = feature_map.get(arg)
            if kind is not None:
                incident.append(Incidence(kind, j, arg))
        if t == 0:
            incident.append(Incidence("strip-boundary", None, ZERO))
        elif t == h:
            incident.append(Incidence("strip-boundary", None, h))
        vertices.append(CriticalVertex(x, t, tuple(incident)))
    return vertices


def critical_vertices(f: PiecewiseFunction, m: int, h: RatLike) -> list:
    """All strip-arrangement vertices for ``f``'s features, sorted by (x, t)."""
    _validate_order(m)
    h = _validate_scale(h)
    return _arrangement_vertices(_feature_list(f), m, h)


# -- candidate configurations at a vertex -------------------------------------


def _half(d) -> int:
    dx, dt = d
    return 0 if (dt > 0 or (dt == 0 and dx > 0)) else 1


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _circular_sort(rays: list) -> list:
    import functools

    def cmp(a, b):
        ha, hb = _half(a), _half(b)
        if ha != hb:
            return -1 if ha < hb else 1
        c = _cross(a, b)
        if c > 0:
            return -1
        if c < 0:
            return 1
        return 0

    return sorted(rays, key=functools.cmp_to_key(cmp))


@lru_cache(maxsize=None)
def _vertex_patterns(incident: tuple, at_t0: bool, at_th: bool, m: int) -> tuple:
    """Candidate side patterns over the incident nodes of a vertex.

    ``incident`` is a sorted tuple of (node index, kind).  Returns a tuple
    of ``(sides, relaxed_ok)`` where ``sides`` assigns -1/0/+1 (below /
    exact / above) to each incident node.  Three classes feed the list:

    * sector patterns: a representative interior direction of each open
      sector of the local ray fan realizes the difference's limit along a
      nearby face;
    * pinned patterns: directions along a spike line keep that node's
      defined (spike) value while the rest take one-sided limits;
    * the exact-point pattern (all incident nodes at defined values),
      which is a genuine limit configuration only when two or more spikes
      pin simultaneously (then no direction can stay on both lines, and
      the configuration is the point itself).

    Directions pointing out of the strip at a boundary vertex are
    discarded.  Patterns are deduplicated; pointwise admits all of them,
    the relaxed flag marks the limit-configuration subset.
    """
    scheme = DifferenceScheme.of_order(m)
    offs = {j: scheme.offsets[j] for j, _ in incident}
    spike_nodes = [j for j, kind in incident if kind == "spike"]

    rays = {(rat(1), ZERO), (rat(-1), ZERO)}
    for j, _ in incident:
        c = offs[j]
        rays.add((-c, rat(1)))
        rays.add((c, rat(-1)))
    fan = _circular_sort(list(rays))

    def admissible(d) -> bool:
        if at_t0 and d[1] < 0:
            return False
        if at_th and d[1] > 0:
            return False
        return True

    def pattern(d) -> tuple:
        out = []
        for j, _ in incident:
            s = d[0] + offs[j] * d[1]
            out.append(0 if s == 0 else (1 if s > 0 else -1))
        return tuple(out)

    collected: dict = {}

    def put(sides: tuple, relaxed_ok: bool) -> None:
        collected[sides] = collected.get(sides, False) or relaxed_ok

    n = len(fan)
    for i in range(n):
        r1 = fan[i]
        r2 = fan[(i + 1) % n]
        c = _cross(r1, r2)
        rep = (-r1[1], r1[0]) if c == 0 else (r1[0] + r2[0], r1[1] + r2[1])
        if rep[1] == 0 or not admissible(rep):
            continue
        sides = pattern(rep)
        assert 0 not in sides, "sector representative landed on a node line"
        put(sides, True)

    for j in spike_nodes:
        c = offs[j]
        for d in ((-c, rat(1)), (c, rat(-1))):
            if not admissible(d):
                continue
            put(pattern(d), True)

    point = tuple(0 for _ in incident)
    put(point, len(spike_nodes) >= 2)

    return tuple(sorted(collected.items()))


@dataclass(frozen=True)
class Configuration:
    """A one-sided evaluation of the difference at an arrangement vertex."""

    x: Rat
    t: Rat
    sides: tuple  # length m+1, side names per node
    relaxed_ok: bool
    value: Rat


def _sweep_configurations(
    f: PiecewiseFunction, m: int, h: Rat, vertices: Optional[list] = None
) -> Iterator[Configuration]:
    """Evaluate every candidate configuration at every critical vertex.

    Node values are shared across the configurations of a vertex: the
    all-exact base sum is corrected per incident node, so the cost per
    configuration is proportional to the number of incident features, not
    to m.
    """
    scheme = DifferenceScheme.of_order(m)
    offsets, coeffs = scheme.offsets, scheme.coefficients
    if vertices is None:
        vertices = _arrangement_vertices(_feature_list(f), m, h)
    cache: dict = {}

    def triple(arg: Rat) -> tuple:
        got = cache.get(arg)
        if got is None:
            got = evaluate_triple(f, arg)
            cache[arg] = got
        return got

    for v in vertices:
        args = [v.x + c * v.t for c in offsets]
        triples = [triple(a) for a in args]
        base = ZERO
        for w, tr in zip(coeffs, triples):
            base += w * tr[1]
        incident = tuple(
            (inc.node, inc.kind) for inc in v.incident if inc.node is not None
        )
        patterns = _vertex_patterns(incident, v.t == 0, v.t == h, m)
        for sides_inc, relaxed_ok in patterns:
            value = base
            full = [0] * (m + 1)
            for (j, _), s in zip(incident, sides_inc):
                if s:
                    tr = triples[j]
                    value += coeffs[j] * ((tr[2] if s > 0 else tr[0]) - tr[1])
                    full[j] = s
            yield Configuration(
                v.x, v.t, tuple(_SIDE_NAME[s] for s in full), relaxed_ok, value
            )


# -- moduli -------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    x: Rat
    t: Rat
    sides: tuple

    def to_json(self) -> dict:
        return {"x": rat_str(self.x), "t": rat_str(self.t), "sides": list(self.sides)}


@dataclass(frozen=True)
class ModulusReport:
    mode: str
    value: Rat
    witness: Witness
    vertices_examined: int

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "value": rat_str(self.value),
            "value_float": rat_float(self.value),
            "witness": self.witness.to_json(),
            "vertices_examined": self.vertices_examined,
        }


def _validate_order(m: int) -> None:
    if not isinstance(m, int) or m < 2 or m % 2 != 0:
        raise UnsupportedOrderError(
            f"the strip maximum is defined for even orders >= 2, got {m!r}"
        )


def _validate_scale(h: RatLike) -> Rat:
    h = rat(h)
    if h <= 0:
        raise InvalidScaleError(f"scale must be positive, got {rat_str(h)}")
    return h


def _validate_mode(mode: str) -> None:
    if mode not in MODES:
        raise InvalidArgumentError(f"mode must be one of {MODES}, got {mode!r}")


def _witness_key(cfg: Configuration) -> tuple:
    return (cfg.x, cfg.t, tuple(_SIDE_CODE[s] for s in cfg.sides))


def modulus_both(f: PiecewiseFunction, m: int, h: RatLike) -> dict:
    """Both strip maxima from a single arrangement sweep.

    Returns ``{"pointwise": ModulusReport, "relaxed": ModulusReport}``.
    Ties are broken toward the lexicographically smallest (x, t, sides)
    with sides ordered below < exact < above.
    """
    _validate_order(m)
    h = _validate_scale(h)
    vertices = _arrangement_vertices(_feature_list(f), m, h)
    trivial = Witness(ZERO, ZERO, ("exact",) * (m + 1))
    best = {
        mode: (ZERO, (None,), trivial) for mode in MODES
    }  # value, tie key, witness
    for cfg in _sweep_configurations(f, m, h, vertices):
        a = abs(cfg.value)
        key = None
        for mode in MODES:
            if mode == "relaxed" and not cfg.relaxed_ok:
                continue
            cur_val, cur_key, _ = best[mode]
            if a < cur_val:
                continue
            if key is None:
                key = _witness_key(cfg)
            if a > cur_val or cur_key[0] is None or key < cur_key:
                best[mode] = (a, key, Witness(cfg.x, cfg.t, cfg.sides))
    return {
        mode: ModulusReport(mode, best[mode][0], best[mode][2], len(vertices))
        for mode in MODES
    }


def modulus_exact(
    f: PiecewiseFunction, m: int, h: RatLike, mode: str = "pointwise"
) -> ModulusReport:
    """Exact maximum of |order-m central difference| over the strip t in [0, h].

    ``mode="pointwise"`` is the literal supremum over defined values;
    ``mode="relaxed"`` restricts spike participation to pinned limit
    configurations.  The relaxed value never exceeds the pointwise one.
    """
    _validate_mode(mode)
    return modulus_both(f, m, h)[mode]


def replay_witness(f: PiecewiseFunction, m: int, report: ModulusReport) -> Rat:
    """Re-evaluate a report's witness configuration; must equal its value."""
    w = report.witness
    return abs(central_difference(f, m, w.t, w.x, w.sides))


def vertex_table(f: PiecewiseFunction, m: int, h: RatLike, mode: str = "pointwise") -> list:
    """Per-vertex maxima ``[(x, t, value), ...]`` for plots and inspection."""
    _validate_mode(mode)
    _validate_order(m)
    h = _validate_scale(h)
    rows: dict = {}
    for cfg in _sweep_configurations(f, m, h):
        if mode == "relaxed" and not cfg.relaxed_ok:
            continue
        key = (cfg.x, cfg.t)
        a = abs(cfg.value)
        if key not in rows or a > rows[key]:
            rows[key] = a
    return [(x, t, v) for (x, t), v in sorted(rows.items())]


def write_vertex_csv(path, f: PiecewiseFunction, m: int, h: RatLike, mode: str = "pointwise") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "t", "value", "x_float", "t_float", "value_float"])
        for x, t, v in vertex_table(f, m, h, mode):
            writer.writerow([rat_str(x), rat_str(t), rat_str(v),
                             rat_float(x), rat_float(t), rat_float(v)])


def modulus_grid(f: PiecewiseFunction, m: int, h: RatLike, n: int) -> float:
    """Float lower estimate of the strip maximum from an n-by-n sample grid.

    Sample points are jittered by fixed irrational-like offsets so they
    never hit breakpoints, spikes or grid-commensurate points; the result
    approaches the relaxed maximum from below as n grows.  This is the
    package's independent sanity oracle for the exact computation, and the
    hot loop served by the compiled kernel.
    """
    _validate_order(m)
    h = _validate_scale(h)
    if not isinstance(n, int) or n < 2:
        raise InvalidArgumentError(f"sample count must be an integer >= 2, got {n!r}")
    span = f.support()
    if span is None:
        return 0.0
    scheme = DifferenceScheme.of_order(m)
    knots, slope, intercept = kernels.segments_from_function(f)
    if len(knots) < 2:
        return 0.0
    hf = rat_float(h)
    lo = rat_float(span[0]) - (m / 2) * hf
    hi = rat_float(span[1]) + (m / 2) * hf
    x_jitter = 0.6180339887498949
    t_jitter = 0.4142135623730951
    xs = lo + (np.arange(n) + x_jitter) * (hi - lo) / n
    ts = (np.arange(n) + t_jitter) * (hf / n)
    offsets = np.array([rat_float(c) for c in scheme.offsets])
    coeffs = np.array([float(w) for w in scheme.coefficients])
    return kernels.grid_max_abs_difference(xs, ts, offsets, coeffs, knots, slope, intercept)


# -- the Whitney ratio ---------------------------------------------------------


def whitney_ratio(f: PiecewiseFunction, k: int, h: RatLike, mode: str = "relaxed") -> Rat:
    """Exact ratio  sup|f| / (order-2k strip maximum at scale h).

    Defined for nonzero functions with zero mean on every step-h grid
    interval; the Whitney-type bounds of :mod:`.bounds` apply to exactly
    this ratio.
    """
    if not isinstance(k, int) or k < 1:
        raise UnsupportedOrderError(f"k must be an integer >= 1, got {k!r}")
    _validate_mode(mode)
    h = _validate_scale(h)
    if f.is_zero:
        raise DegenerateInputError("the zero function has no Whitney ratio")
    if not is_oscillating(f, h):
        raise RequiresOscillationError(
            "whitney_ratio needs zero mean on every grid interval; "
            "normalize with make_oscillating first"
        )
    norm = sup_norm(f).value
    mod = modulus_exact(f, 2 * k, h, mode).value
    if mod == 0:
        raise DegenerateInputError(
            "strip maximum is zero for a nonzero function; ratio undefined"
        )
    return norm / mod
