"""LP search for extremal oscillating functions on a fixed geometry.

A geometry pins down breakpoint and spike positions; the values at those
features are unknowns.  The strip arrangement of the difference's node
lines depends only on positions, so every limiting configuration of the
relaxed strip maximum is a fixed linear form in the unknowns.  Bounding
each form by 1, adding the exact zero-integral and boundary rows, and
maximizing the value at a chosen feature gives a linear program; exact
certification then turns its float solution into a proven ratio.
"""

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from .bounds import whitney_bounds
from .differences import (
    Witness,
    _arrangement_vertices,
    _feature_list,
    _SIDE_NAME,
    _vertex_patterns,
    DifferenceScheme,
    modulus_exact,
)
from .errors import (
    CertificationError,
    DegenerateInputError,
    FunctionFormatError,
    InvalidGeometryError,
)
from .funcspace import (
    Breakpoint,
    PiecewiseFunction,
    Spike,
    build,
    evaluate,
    evaluate_triple,
    function_from_json,
    function_to_json,
    is_oscillating,
    make_oscillating,
    scale_values,
    sup_norm,
)
from .rational import (
    ONE,
    Rat,
    ZERO,
    rat,
    rat_float,
    rat_str,
    rational_from_float,
)
from .simplex import SimplexResult, solve

__all__ = [
    "Certificate",
    "LinearConstraint",
    "LinearProgram",
    "SearchGeometry",
    "SearchReport",
    "build_lp",
    "certificate_from_json",
    "certify",
    "equality_rows",
    "geometry_from_json",
    "geometry_to_json",
    "induced_assignment",
    "linear_form_at",
    "load_geometry",
    "make_geometry",
    "modulus_forms",
    "realize",
    "replay_certificate",
    "row_value",
    "save_geometry",
    "search",
    "shipped_geometry",
    "solve_lp",
    "variable_names",
]

DENOMINATOR_CAP = 10**6


# -- geometry ------------------------------------------------------------------


@dataclass(frozen=True)
class SearchGeometry:
    """Fixed feature positions for the value search.

    ``grid`` holds the breakpoint positions (each carries a left-limit
    and a right-value unknown), ``spike_positions`` the isolated defined
    points (one unknown each).  ``objective_point`` is the feature whose
    value the search maximizes.
    """

    k: int
    h: Rat
    grid: tuple
    spike_positions: tuple
    objective_point: Rat

    @property
    def order(self) -> int:
        return 2 * self.k


def make_geometry(k, h, grid, spike_positions, objective_point) -> SearchGeometry:
    """Validate and normalize raw geometry data."""
    if not isinstance(k, int) or k < 1:
        raise InvalidGeometryError(f"half-order must be a positive integer, got {k!r}")
    h = rat(h)
    if h <= 0:
        raise InvalidGeometryError(f"scale must be positive, got {rat_str(h)}")
    nodes = sorted(rat(g) for g in grid)
    if len(nodes) < 2:
        raise InvalidGeometryError("geometry needs at least two breakpoints")
    if len(set(nodes)) != len(nodes):
        raise InvalidGeometryError("duplicate breakpoint positions")
    span = (nodes[-1] - nodes[0]) / h
    if span.denominator != 1 or span < 1:
        raise InvalidGeometryError(
            "breakpoints must span a positive integer multiple of the scale, "
            f"got span {rat_str(nodes[-1] - nodes[0])} over scale {rat_str(h)}"
        )
    base = nodes[0] / h
    if base.denominator != 1:
        raise InvalidGeometryError(
            f"first breakpoint must sit on the scale lattice, got {rat_str(nodes[0])}"
        )
    node_set = set(nodes)
    for j in range(int(span) + 1):
        point = nodes[0] + j * h
        if point not in node_set:
            raise InvalidGeometryError(
                f"lattice point {rat_str(point)} is missing from the grid"
            )
    spikes = sorted(rat(s) for s in spike_positions)
    if len(set(spikes)) != len(spikes):
        raise InvalidGeometryError("duplicate spike positions")
    for s in spikes:
        if not (nodes[0] < s < nodes[-1]):
            raise InvalidGeometryError(
                f"spike {rat_str(s)} must lie strictly inside the grid span"
            )
        if s in node_set:
            # This also keeps spikes off the scale lattice: every lattice
            # point inside the span is required to be a breakpoint.
            raise InvalidGeometryError(
                f"spike {rat_str(s)} coincides with a breakpoint"
            )
    objective = rat(objective_point)
    if objective not in node_set and objective not in set(spikes):
        raise InvalidGeometryError(
            f"objective point {rat_str(objective)} is not a geometry feature"
        )
    return SearchGeometry(
        k=k,
        h=h,
        grid=tuple(nodes),
        spike_positions=tuple(spikes),
        objective_point=objective,
    )


def geometry_to_json(geometry: SearchGeometry) -> dict:
    return {
        "k": geometry.k,
        "h": rat_str(geometry.h),
        "grid": [rat_str(g) for g in geometry.grid],
        "spike_positions": [rat_str(s) for s in geometry.spike_positions],
        "objective_point": rat_str(geometry.objective_point),
    }


def geometry_from_json(data: dict) -> SearchGeometry:
    if not isinstance(data, dict):
        raise InvalidGeometryError("geometry document must be an object")
    required = {"k", "h", "grid", "spike_positions", "objective_point"}
    missing = required - set(data)
    if missing:
        raise InvalidGeometryError(f"geometry document missing {sorted(missing)}")
    try:
        return make_geometry(
            data["k"],
            data["h"],
            data["grid"],
            data["spike_positions"],
            data["objective_point"],
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidGeometryError):
            raise
        raise InvalidGeometryError(f"malformed geometry document: {exc}") from exc


def save_geometry(geometry: SearchGeometry, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(geometry_to_json(geometry), fh, indent=2)
        fh.write("\n")


def load_geometry(path) -> SearchGeometry:
    with open(path, "r", encoding="utf-8") as fh:
        return geometry_from_json(json.load(fh))


def shipped_geometry() -> SearchGeometry:
    """The packaged search geometry containing the stock extremal example."""
    text = (
        resources.files("whitneylab")
        .joinpath("data/extremal_geometry.json")
        .read_text(encoding="utf-8")
    )
    return geometry_from_json(json.loads(text))


# -- variables and linear forms ------------------------------------------------


def variable_names(geometry: SearchGeometry) -> tuple:
    """Column order: (left, i) and (right, i) per breakpoint, then spikes."""
    names = []
    for i in range(len(geometry.grid)):
        names.append(("left", i))
        names.append(("right", i))
    for j in range(len(geometry.spike_positions)):
        names.append(("spike", j))
    return tuple(names)


def _variable_index(geometry: SearchGeometry) -> dict:
    return {name: i for i, name in enumerate(variable_names(geometry))}


def linear_form_at(geometry: SearchGeometry, position, side: str = "exact") -> dict:
    """The value of the realized function at ``position`` from the given
    side, as a sparse linear form over the variable names."""
    if side not in ("below", "exact", "above"):
        raise InvalidGeometryError(f"unknown side {side!r}")
    x = rat(position)
    nodes = geometry.grid
    if x < nodes[0] or x > nodes[-1]:
        return {}
    if side == "exact":
        for j, s in enumerate(geometry.spike_positions):
            if s == x:
                return {("spike", j): ONE}
    lo, hi = 0, len(nodes) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if nodes[mid] <= x:
            lo = mid
        else:
            hi = mid - 1
    if nodes[lo] == x:
        if side == "below":
            return {("left", lo): ONE}
        return {("right", lo): ONE}
    weight = (x - nodes[lo]) / (nodes[lo + 1] - nodes[lo])
    return {("right", lo): ONE - weight, ("left", lo + 1): weight}


def _probe_function(geometry: SearchGeometry) -> PiecewiseFunction:
    """A dummy function carrying the geometry's features; the arrangement
    enumeration never reads values."""
    return PiecewiseFunction(
        breakpoints=tuple(Breakpoint(g, ZERO, ZERO) for g in geometry.grid),
        spikes=tuple(Spike(s, ONE) for s in geometry.spike_positions),
    )


# -- constraint rows -------------------------------------------------------------


@dataclass(frozen=True)
class LinearConstraint:
    """One dense row: coefficients . values  (relation)  rhs."""

    coefficients: tuple
    relation: str
    rhs: Rat
    kind: str
    origin: Optional[Witness] = None


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple
    objective: tuple
    constraints: tuple
    geometry: SearchGeometry


@dataclass(frozen=True)
class ModulusForm:
    """A limiting difference expression as a dense coefficient row with
    canonical sign; both ``row <= 1`` and ``-row <= 1`` apply."""

    coefficients: tuple
    origin: Witness
    on_boundary: bool
    pins_objective: bool


def equality_rows(geometry: SearchGeometry) -> list:
    """Zero boundary values plus one exact zero-integral row per lattice
    cell, all as equality constraints."""
    names = variable_names(geometry)
    index = _variable_index(geometry)
    n = len(names)
    nodes = geometry.grid
    rows = []

    def dense(form: dict) -> tuple:
        out = [ZERO] * n
        for key, val in form.items():
            out[index[key]] = val
        return tuple(out)

    rows.append(
        LinearConstraint(dense({("left", 0): ONE}), "==", ZERO, "boundary")
    )
    rows.append(
        LinearConstraint(
            dense({("right", len(nodes) - 1): ONE}), "==", ZERO, "boundary"
        )
    )
    span = int((nodes[-1] - nodes[0]) / geometry.h)
    for j in range(span):
        cell_lo = nodes[0] + j * geometry.h
        cell_hi = cell_lo + geometry.h
        form: dict = {}
        for i in range(len(nodes) - 1):
            if nodes[i] < cell_lo or nodes[i + 1] > cell_hi:
                continue
            half = (nodes[i + 1] - nodes[i]) / 2
            form[("right", i)] = form.get(("right", i), ZERO) + half
            form[("left", i + 1)] = form.get(("left", i + 1), ZERO) + half
        rows.append(LinearConstraint(dense(form), "==", ZERO, "oscillation"))
    return rows


def modulus_forms(geometry: SearchGeometry) -> list:
    """Every limiting configuration of the relaxed strip maximum over the
    geometry's arrangement, as deduplicated dense forms.

    The enumeration is shared with the exact modulus: same vertices, same
    per-vertex side patterns.  A realized function's relaxed strip
    maximum equals the largest |form . values|, so bounding every form by
    1 constrains the modulus exactly.
    """
    names = variable_names(geometry)
    index = _variable_index(geometry)
    n = len(names)
    m = geometry.order
    scheme = DifferenceScheme.of_order(m)
    offsets, coeffs = scheme.offsets, scheme.coefficients
    probe = _probe_function(geometry)
    vertices = _arrangement_vertices(_feature_list(probe), m, geometry.h)
    objective_form = linear_form_at(geometry, geometry.objective_point, "exact")
    objective_cols = {index[key] for key in objective_form}

    seen: dict = {}
    out = []
    for v in vertices:
        incident = tuple(
            (inc.node, inc.kind) for inc in v.incident if inc.node is not None
        )
        patterns = _vertex_patterns(incident, v.t == 0, v.t == geometry.h, m)
        for sides_inc, relaxed_ok in patterns:
            if not relaxed_ok:
                continue
            full = [0] * (m + 1)
            for (j, _), s in zip(incident, sides_inc):
                full[j] = s
            dense = [ZERO] * n
            for j in range(m + 1):
                contrib = linear_form_at(
                    geometry, v.x + offsets[j] * v.t, _SIDE_NAME[full[j]]
                )
                for key, val in contrib.items():
                    dense[index[key]] += coeffs[j] * val
            first = next((c for c in dense if c != 0), None)
            if first is None:
                continue
            if first < 0:
                dense = [-c for c in dense]
            key = tuple(dense)
            if key in seen:
                continue
            seen[key] = True
            out.append(
                ModulusForm(
                    coefficients=key,
                    origin=Witness(v.x, v.t, tuple(_SIDE_NAME[s] for s in full)),
                    on_boundary=(v.t == 0 or v.t == geometry.h),
                    pins_objective=any(key[c] != 0 for c in objective_cols),
                )
            )
    return out


def build_lp(geometry: SearchGeometry) -> LinearProgram:
    """The full program: equality rows plus both signs of every modulus
    form, maximizing the value at the objective point."""
    if not isinstance(geometry, SearchGeometry):
        raise InvalidGeometryError("build_lp expects a SearchGeometry")
    names = variable_names(geometry)
    index = _variable_index(geometry)
    objective = [ZERO] * len(names)
    for key, val in linear_form_at(
        geometry, geometry.objective_point, "exact"
    ).items():
        objective[index[key]] = val
    constraints = list(equality_rows(geometry))
    for form in modulus_forms(geometry):
        constraints.append(
            LinearConstraint(form.coefficients, "<=", ONE, "modulus", form.origin)
        )
        constraints.append(
            LinearConstraint(
                tuple(-c for c in form.coefficients),
                "<=",
                ONE,
                "modulus",
                form.origin,
            )
        )
    return LinearProgram(
        variables=names,
        objective=tuple(objective),
        constraints=tuple(constraints),
        geometry=geometry,
    )


def solve_lp(lp: LinearProgram, max_iterations: int = 200000) -> SimplexResult:
    """Float rendering of the exact program, solved by the dense simplex."""
    objective = [rat_float(c) for c in lp.objective]
    constraints = [
        ([rat_float(c) for c in row.coefficients], row.relation, rat_float(row.rhs))
        for row in lp.constraints
    ]
    return solve(objective, constraints, maximize=True, max_iterations=max_iterations)


# -- exact realization and certification ----------------------------------------


def _rationalize(values: Sequence, denominator_cap: int) -> list:
    out = []
    for v in values:
        if isinstance(v, float):
            out.append(rational_from_float(v, denominator_cap))
        else:
            out.append(rat(v))
    return out


def realize(geometry: SearchGeometry, values: Sequence) -> PiecewiseFunction:
    """Materialize an exact variable assignment as a function.

    The two boundary unknowns are snapped to zero: every program fixes
    them, and snapping keeps tiny float residue from breaking the
    compact-support validation.
    """
    names = variable_names(geometry)
    if len(values) != len(names):
        raise InvalidGeometryError(
            f"expected {len(names)} values, got {len(values)}"
        )
    vals = [rat(v) for v in values]
    index = _variable_index(geometry)
    vals[index[("left", 0)]] = ZERO
    vals[index[("right", len(geometry.grid) - 1)]] = ZERO
    points = []
    for i, g in enumerate(geometry.grid):
        points.append((g, vals[index[("left", i)]], vals[index[("right", i)]]))
    spikes = []
    for j, s in enumerate(geometry.spike_positions):
        spikes.append((s, vals[index[("spike", j)]]))
    return build(points, spikes)


def induced_assignment(geometry: SearchGeometry, f: PiecewiseFunction) -> tuple:
    """Read the geometry's variable values off a concrete function."""
    out = []
    for g in geometry.grid:
        below, exact, _ = evaluate_triple(f, g)
        out.append(below)
        out.append(exact)
    for s in geometry.spike_positions:
        out.append(evaluate(f, s, "exact"))
    return tuple(out)


def row_value(coefficients: Sequence, values: Sequence) -> Rat:
    total = ZERO
    for c, v in zip(coefficients, values):
        if c != 0:
            total += c * v
    return total


@dataclass(frozen=True)
class Certificate:
    """An exactly verified extremal candidate, scaled to strip maximum 1.

    ``ratio = norm / modulus`` holds exactly; the function satisfies the
    zero-integral condition exactly; ``source_modulus`` records the strip
    maximum of the unscaled candidate the values came from.
    """

    function: PiecewiseFunction
    modulus: Rat
    norm: Rat
    ratio: Rat
    geometry: SearchGeometry
    source_modulus: Rat

    def to_json(self) -> dict:
        return {
            "function": function_to_json(self.function),
            "modulus": rat_str(self.modulus),
            "norm": rat_str(self.norm),
            "ratio": rat_str(self.ratio),
            "ratio_float": rat_float(self.ratio),
            "source_modulus": rat_str(self.source_modulus),
            "geometry": geometry_to_json(self.geometry),
        }


def certificate_from_json(data: dict) -> Certificate:
    if not isinstance(data, dict):
        raise FunctionFormatError("certificate document must be an object")
    required = {"function", "modulus", "norm", "ratio", "source_modulus", "geometry"}
    missing = required - set(data)
    if missing:
        raise FunctionFormatError(f"certificate document missing {sorted(missing)}")
    return Certificate(
        function=function_from_json(data["function"]),
        modulus=rat(data["modulus"]),
        norm=rat(data["norm"]),
        ratio=rat(data["ratio"]),
        geometry=geometry_from_json(data["geometry"]),
        source_modulus=rat(data["source_modulus"]),
    )


def _package(geometry: SearchGeometry, oscillating: PiecewiseFunction) -> Certificate:
    """Exact certification of an already zero-integral candidate."""
    if oscillating.is_zero:
        raise DegenerateInputError("certification requires a nonzero function")
    q = modulus_exact(oscillating, geometry.order, geometry.h, "relaxed").value
    if q == 0:
        raise DegenerateInputError(
            "candidate has zero strip maximum but is not the zero function"
        )
    scaled = scale_values(oscillating, 1 / q)
    norm = sup_norm(scaled).value
    upper = whitney_bounds(geometry.k).upper
    if norm > upper:
        raise CertificationError(
            "certified ratio exceeds the proven upper bound",
            report={
                "ratio": rat_str(norm),
                "upper": rat_str(upper),
                "function": function_to_json(scaled),
            },
        )
    return Certificate(
        function=scaled,
        modulus=ONE,
        norm=norm,
        ratio=norm,
        geometry=geometry,
        source_modulus=q,
    )


def certify(
    geometry: SearchGeometry,
    values: Sequence,
    denominator_cap: int = DENOMINATOR_CAP,
) -> Certificate:
    """Turn a (possibly float) variable assignment into an exact certificate.

    Floats are rationalized by continued-fraction rounding, the candidate
    is projected onto the zero-integral subspace, its relaxed strip
    maximum is computed exactly, and the result is rescaled to maximum 1.
    The certificate is exact regardless of how rough the input was.
    """
    vals = _rationalize(values, denominator_cap)
    candidate = realize(geometry, vals)
    oscillating = make_oscillating(candidate, geometry.h)
    return _package(geometry, oscillating)


def replay_certificate(certificate: Certificate) -> bool:
    """Recompute every exact claim of a certificate; raise on mismatch."""
    geometry = certificate.geometry
    f = certificate.function
    problems = []
    if not is_oscillating(f, geometry.h):
        problems.append("zero-integral condition fails")
    q = modulus_exact(f, geometry.order, geometry.h, "relaxed").value
    if q != certificate.modulus:
        problems.append(
            f"strip maximum replays to {rat_str(q)}, not {rat_str(certificate.modulus)}"
        )
    norm = sup_norm(f).value
    if norm != certificate.norm:
        problems.append(
            f"norm replays to {rat_str(norm)}, not {rat_str(certificate.norm)}"
        )
    if certificate.ratio * certificate.modulus != certificate.norm:
        problems.append("ratio is not exactly norm / modulus")
    if certificate.ratio > whitney_bounds(geometry.k).upper:
        problems.append("ratio exceeds the proven upper bound")
    if problems:
        raise CertificationError(
            "certificate replay failed: " + "; ".join(problems),
            report=certificate.to_json(),
        )
    return True


# -- the search loop -------------------------------------------------------------


@dataclass(frozen=True)
class SearchReport:
    """Outcome of the cutting-plane search."""

    certificate: Certificate
    converged: bool
    rounds: int
    objectives: tuple

    def to_json(self) -> dict:
        return {
            "certificate": self.certificate.to_json(),
            "converged": self.converged,
            "rounds": self.rounds,
            "objectives": list(self.objectives),
        }


def search(
    geometry: SearchGeometry,
    max_rounds: int = 24,
    denominator_cap: int = DENOMINATOR_CAP,
    tolerance: float = 1e-9,
    max_iterations: int = 200000,
    cuts_per_round: int = 64,
) -> SearchReport:
    """Delayed-constraint maximization of the certified ratio.

    Starts from the equality rows plus a seed of modulus forms (strip
    boundary vertices and every form touching the objective variable),
    then alternates: solve the float LP, certify its solution exactly,
    and activate the forms the exact candidate violates.  Certification
    never trusts the LP: each round's certificate is exact on its own.
    """
    if max_rounds < 1:
        raise InvalidGeometryError(f"round limit must be >= 1, got {max_rounds!r}")
    forms = modulus_forms(geometry)
    equalities = equality_rows(geometry)
    names = variable_names(geometry)
    index = _variable_index(geometry)
    objective = [0.0] * len(names)
    for key, val in linear_form_at(
        geometry, geometry.objective_point, "exact"
    ).items():
        objective[index[key]] = rat_float(val)

    float_rows = {}

    def simplex_rows(active_ids):
        rows = [
            (
                [rat_float(c) for c in row.coefficients],
                row.relation,
                rat_float(row.rhs),
            )
            for row in equalities
        ]
        for i in active_ids:
            cached = float_rows.get(i)
            if cached is None:
                cached = [rat_float(c) for c in forms[i].coefficients]
                float_rows[i] = cached
            rows.append((cached, "<=", 1.0))
            rows.append(([-c for c in cached], "<=", 1.0))
        return rows

    active = [
        i
        for i, form in enumerate(forms)
        if form.on_boundary or form.pins_objective
    ]
    if not active:
        active = list(range(len(forms)))
    active_set = set(active)

    best: Optional[tuple] = None  # (ratio, oscillating function)
    objectives = []
    converged = False
    rounds_used = 0
    for _ in range(max_rounds):
        rounds_used += 1
        result = solve(
            objective,
            simplex_rows(active),
            maximize=True,
            max_iterations=max_iterations,
        )
        if result.status == "unbounded":
            if len(active_set) == len(forms):
                raise CertificationError(
                    "program is unbounded with every modulus form active",
                    report=geometry_to_json(geometry),
                )
            objectives.append(float("inf"))
            active = list(range(len(forms)))
            active_set = set(active)
            continue
        if result.status != "optimal":
            raise CertificationError(
                f"search round ended with status {result.status}",
                report=geometry_to_json(geometry),
            )
        objectives.append(result.objective)
        vals = _rationalize(result.values, denominator_cap)
        oscillating = make_oscillating(realize(geometry, vals), geometry.h)
        if oscillating.is_zero:
            raise DegenerateInputError(
                "search round produced the zero function; the geometry "
                "admits no positive objective"
            )
        q = modulus_exact(oscillating, geometry.order, geometry.h, "relaxed").value
        ratio = sup_norm(oscillating).value / q
        if best is None or ratio > best[0]:
            best = (ratio, oscillating)
        if rat_float(q) <= 1.0 + tolerance:
            converged = True
            break
        assignment = induced_assignment(geometry, oscillating)
        violations = []
        for i, form in enumerate(forms):
            if i in active_set:
                continue
            value = abs(row_value(form.coefficients, assignment))
            if value > 1:
                violations.append((value, i))
        if not violations:
            break
        violations.sort(key=lambda item: (item[0], -item[1]), reverse=True)
        for _, i in violations[:cuts_per_round]:
            active.append(i)
            active_set.add(i)

    certificate = _package(geometry, best[1])
    return SearchReport(
        certificate=certificate,
        converged=converged,
        rounds=rounds_used,
        objectives=tuple(objectives),
    )
