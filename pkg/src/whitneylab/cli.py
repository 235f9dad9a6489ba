"""Deterministic command line surface tying the laboratory together.

Every subcommand prints a run report (text by default, ``--json`` for a
machine-readable document) and finishes with a stable exit code:

* 0 - success, all verdicts passed
* 1 - a verification verdict failed; the report carries the evidence
* 2 - usage or input errors

Randomized subcommands take a mandatory ``--seed``; nothing reads ambient
entropy, so identical flags give identical reports (timing aside).
"""

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .bounds import (
    bounds_table,
    combined_upper_bound,
    shrunk_step_one_sided_term,
    upper_bound_scan,
    whitney2_bounds,
    whitney_bounds,
)
from .differences import modulus_both, modulus_exact, whitney_ratio
from .errors import (
    CertificationError,
    DegenerateInputError,
    FunctionFormatError,
    InvalidArgumentError,
    InvalidGeometryError,
    InvalidLengthError,
    InvalidRangeError,
    InvalidScaleError,
    RequiresGenericPointError,
    RequiresNonPoleError,
    RequiresOscillationError,
    UnsupportedOrderError,
)
from .funcspace import (
    evaluate_triple,
    extremal_example,
    is_oscillating,
    load_function,
    random_oscillating,
    save_function,
    signed_integral,
    sup_norm,
)
from .extremal import load_geometry, search, shipped_geometry
from .rational import format_float, is_integer, rat, rat_float, rat_str
from .steklov import (
    check_integer_point_identity,
    check_integral_factorization,
    check_integral_representation,
    check_product_identity,
    check_remainder_decomposition,
)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2

_USAGE_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    json.JSONDecodeError,
    FunctionFormatError,
    InvalidArgumentError,
    InvalidGeometryError,
    InvalidLengthError,
    InvalidRangeError,
    InvalidScaleError,
    RequiresOscillationError,
    UnsupportedOrderError,
    DegenerateInputError,
)


@dataclass
class RunReport:
    """Outcome of one subcommand: echoed inputs, results, verdicts."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    elapsed_seconds: float = 0.0

    def ok(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "results": self.results,
            "verdicts": self.verdicts,
            "elapsed_seconds": self.elapsed_seconds,
        }

    def render_text(self) -> str:
        lines = [f"subcommand: {self.subcommand}"]
        if self.inputs:
            lines.append("inputs:")
            lines.extend(f"  {k} = {v}" for k, v in self.inputs.items())
        lines.append("results:")
        lines.extend(f"  {k} = {v}" for k, v in self.results.items())
        if self.verdicts:
            lines.append("verdicts:")
            lines.extend(
                f"  {k}: {'pass' if ok else 'FAIL'}" for k, ok in self.verdicts.items()
            )
        lines.append(f"elapsed_seconds: {self.elapsed_seconds}")
        return "\n".join(lines)


def _put_exact(results: dict, key: str, value) -> None:
    results[key] = rat_str(value)
    results[key + "_float"] = format_float(rat_float(value))


def _put_witness(results: dict, key: str, witness) -> None:
    results[key + "_x"] = rat_str(witness.x)
    results[key + "_t"] = rat_str(witness.t)
    results[key + "_sides"] = ",".join(witness.sides)


def _load_or_example(path):
    if path is None:
        return extremal_example()
    return load_function(path)


# ---------------------------------------------------------------- verify


def _cmd_verify_example(args) -> RunReport:
    report = RunReport("verify-example", inputs={"mode": args.mode})
    f = extremal_example()
    results = report.results

    integrals_zero = True
    lo, hi = f.support()
    for j in range(int(lo), int(hi)):
        value = signed_integral(f, j, j + 1)
        results[f"cell_integral_{j}_{j + 1}"] = rat_str(value)
        integrals_zero = integrals_zero and value == 0

    norm = sup_norm(f)
    _put_exact(results, "sup_norm", norm.value)
    results["sup_norm_at"] = rat_str(norm.position)

    both = modulus_both(f, 2, 1)
    for mode in ("pointwise", "relaxed"):
        rep = both[mode]
        _put_exact(results, f"{mode}_modulus", rep.value)
        _put_witness(results, f"{mode}_witness", rep.witness)
        _put_exact(results, f"{mode}_ratio", norm.value / rep.value)

    gate = both[args.mode]
    report.verdicts["integrals_zero"] = integrals_zero
    report.verdicts["norm_is_43_74"] = norm.value == rat(43, 74)
    report.verdicts[f"{args.mode}_modulus_is_one"] = gate.value == 1
    if gate.value != 1:
        results["discrepancy"] = (
            f"{args.mode} modulus is {rat_str(gate.value)}, not 1/1; "
            f"witness x = {rat_str(gate.witness.x)}, t = {rat_str(gate.witness.t)}, "
            f"sides = {','.join(gate.witness.sides)}"
        )
    return report


# ---------------------------------------------------------------- modulus


def _cmd_modulus(args) -> RunReport:
    report = RunReport(
        "modulus",
        inputs={
            "input": args.input or "(built-in example)",
            "order": args.order,
            "scale": args.scale,
            "mode": args.mode,
        },
    )
    f = _load_or_example(args.input)
    rep = modulus_exact(f, args.order, rat(args.scale), args.mode)
    _put_exact(report.results, "modulus", rep.value)
    _put_witness(report.results, "witness", rep.witness)
    report.results["vertices_examined"] = rep.vertices_examined
    return report


# ---------------------------------------------------------------- bounds


def _cmd_bounds(args) -> RunReport:
    report = RunReport("bounds", inputs={"kmax": args.kmax, "scan": args.scan})
    results = report.results
    for k, lower, upper in bounds_table(args.kmax):
        results[f"k{k}_lower"] = rat_str(lower)
        results[f"k{k}_upper"] = rat_str(upper)
        results[f"k{k}_lower_float"] = format_float(rat_float(lower))
        results[f"k{k}_upper_float"] = format_float(rat_float(upper))
    refined = whitney2_bounds()
    _put_exact(results, "order2_refined_lower", refined.lower)
    _put_exact(results, "order2_refined_upper", refined.upper)
    combined = combined_upper_bound()
    results["order2_combined_x0"] = format_float(combined.x0)
    results["order2_combined_value"] = format_float(combined.value)
    _put_exact(results, "one_sided_term_at_1_3", shrunk_step_one_sided_term(rat(1, 3)))
    if args.scan:
        scan = upper_bound_scan(args.scan)
        _put_exact(results, "scan_worst_value", scan.value)
        results["scan_worst_at"] = rat_str(scan.argmax)
    return report


# ---------------------------------------------------------------- steklov


def _steklov_trial(f, k, rng, retries=64):
    """One randomized identity check; returns (name, CheckResult)."""
    kind = rng.choice(
        ("representation", "factorization", "decomposition", "integer-point", "product")
    )
    if kind == "representation":
        for _ in range(retries):
            query = [rat(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(4)]
            try:
                return kind, check_integral_representation(f, k, *query)
            except RequiresGenericPointError:
                continue
        raise InvalidArgumentError("could not draw a generic representation query")
    if kind == "factorization":
        for _ in range(retries):
            x = rat(rng.randint(-30, 30), rng.randint(1, 7))
            if is_integer(x) and -k <= x <= k:
                continue
            try:
                return kind, check_integral_factorization(f, k, x)
            except RequiresNonPoleError:
                continue
        raise InvalidArgumentError("could not draw a non-pole factorization query")
    if kind == "decomposition":
        x = rat(rng.randint(-30, 30), rng.randint(1, 9))
        return kind, check_remainder_decomposition(f, k, x)
    if kind == "integer-point":
        lo, hi = f.support()
        j = rng.randint(int(lo) - 1, int(hi) + 1)
        return kind, check_integer_point_identity(f, k, j)
    x = rat(rng.randint(-99, 99), rng.randint(1, 13))
    return kind, check_product_identity(x, k)


def _cmd_steklov_check(args) -> RunReport:
    import random as _random

    report = RunReport(
        "steklov-check",
        inputs={
            "input": args.input or "(built-in example)",
            "k": args.k,
            "trials": args.trials,
            "seed": args.seed,
        },
    )
    f = _load_or_example(args.input)
    if not is_oscillating(f, 1):
        raise RequiresOscillationError(
            "steklov-check needs zero integrals over unit cells; "
            "the factorization and integer-point identities assume them"
        )
    if args.trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {args.trials}")
    rng = _random.Random(args.seed)
    passed = {}
    failed = {}
    first_failure = None
    for _ in range(args.trials):
        kind, res = _steklov_trial(f, args.k, rng)
        bucket = passed if res.equal else failed
        bucket[kind] = bucket.get(kind, 0) + 1
        if not res.equal and first_failure is None:
            first_failure = (kind, res)
    for kind in ("representation", "factorization", "decomposition", "integer-point", "product"):
        report.results[f"{kind}_passed"] = passed.get(kind, 0)
        report.results[f"{kind}_failed"] = failed.get(kind, 0)
    if first_failure is not None:
        kind, res = first_failure
        report.results["first_failure"] = json.dumps(
            {"check": kind, **res.to_json()}, sort_keys=True
        )
    report.verdicts["all_identities_hold"] = not failed
    return report


# ---------------------------------------------------------------- random


def _random_trial(packed):
    """Worker for random-test; returns only plain strings and bools."""
    trial_seed, k = packed
    f = random_oscillating(trial_seed, 1, complexity=1 + trial_seed % 2)
    cap = whitney_bounds(k).upper
    row = {"seed": trial_seed}
    for mode in ("pointwise", "relaxed"):
        ratio = whitney_ratio(f, k, 1, mode)
        row[mode] = rat_str(ratio)
        row[mode + "_ok"] = ratio <= cap
    return row


def _cmd_random_test(args) -> RunReport:
    import random as _random

    report = RunReport(
        "random-test",
        inputs={
            "k": args.k,
            "trials": args.trials,
            "seed": args.seed,
            "workers": args.workers,
        },
    )
    if args.trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {args.trials}")
    if args.workers < 1:
        raise InvalidArgumentError(f"workers must be >= 1, got {args.workers}")
    whitney_bounds(args.k)
    rng = _random.Random(args.seed)
    jobs = [(rng.randint(1, 2**31 - 1), args.k) for _ in range(args.trials)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_random_trial, jobs, chunksize=8))
    else:
        rows = [_random_trial(job) for job in jobs]

    cap = whitney_bounds(args.k).upper
    _put_exact(report.results, "ratio_cap", cap)
    violations = []
    for mode in ("pointwise", "relaxed"):
        worst = max(rows, key=lambda row: rat(row[mode]))
        _put_exact(report.results, f"worst_{mode}_ratio", rat(worst[mode]))
        report.results[f"worst_{mode}_seed"] = worst["seed"]
        violations.extend(row for row in rows if not row[mode + "_ok"])
    report.results["violations"] = len(violations)
    for row in violations:
        path = f"counterexample_k{args.k}_seed{row['seed']}.json"
        save_function(
            random_oscillating(row["seed"], 1, complexity=1 + row["seed"] % 2), path
        )
        report.results[f"counterexample_{row['seed']}"] = path
    report.verdicts["ratios_within_bound"] = not violations
    return report


# ---------------------------------------------------------------- search


def _cmd_search(args) -> RunReport:
    report = RunReport(
        "search",
        inputs={
            "geometry": args.geometry or "(shipped geometry)",
            "rounds": args.rounds,
            "out": args.out or "(not written)",
        },
    )
    geometry = shipped_geometry() if args.geometry is None else load_geometry(args.geometry)
    outcome = search(geometry, max_rounds=args.rounds)
    cert = outcome.certificate
    _put_exact(report.results, "ratio", cert.ratio)
    _put_exact(report.results, "norm", cert.norm)
    _put_exact(report.results, "modulus", cert.modulus)
    _put_exact(report.results, "source_modulus", cert.source_modulus)
    report.results["converged"] = outcome.converged
    report.results["rounds"] = outcome.rounds
    report.results["objectives"] = ",".join(format_float(v) for v in outcome.objectives)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(cert.to_json(), handle, indent=2)
            handle.write("\n")
    from .extremal import replay_certificate

    report.verdicts["certificate_replays"] = replay_certificate(cert)
    return report


# ---------------------------------------------------------------- plot


_SIDE_ORDER = {"below": 0, "exact": 1, "above": 2}


def _cmd_plot_data(args) -> RunReport:
    report = RunReport(
        "plot-data",
        inputs={
            "input": args.input or "(built-in example)",
            "samples": args.samples,
            "out": args.out,
        },
    )
    if args.samples < 0:
        raise InvalidArgumentError(f"samples must be >= 0, got {args.samples}")
    f = _load_or_example(args.input)
    rows = []

    for position in f.feature_positions:
        below, exact, above = evaluate_triple(f, position)
        rows.append((position, "below", below))
        rows.append((position, "exact", exact))
        rows.append((position, "above", above))

    span = f.support()
    if span is not None and args.samples:
        lo, hi = span
        width = hi - lo
        for i in range(args.samples):
            x = lo + width * rat(2 * i + 1, 2 * args.samples)
            rows.append((x, "exact", evaluate_triple(f, x)[1]))

    rows.sort(key=lambda row: (row[0], _SIDE_ORDER[row[1]]))
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "side", "value", "x_float", "value_float"])
        for x, side, value in rows:
            writer.writerow(
                [
                    rat_str(x),
                    side,
                    rat_str(value),
                    format_float(rat_float(x)),
                    format_float(rat_float(value)),
                ]
            )
    report.results["rows_written"] = len(rows)
    report.results["out"] = args.out
    return report


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whitneylab",
        description="Exact-arithmetic laboratory for oscillation-constrained "
        "piecewise-linear functions: moduli, bounds, identity checks, and "
        "certified ratio search.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json", action="store_true", help="emit the report as JSON instead of text"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "verify-example",
        parents=[common],
        help="check the built-in example against its known values",
    )
    p.add_argument(
        "--mode",
        choices=("relaxed", "pointwise"),
        default="relaxed",
        help="which modulus gates the verdict (default: relaxed)",
    )
    p.set_defaults(handler=_cmd_verify_example)

    p = sub.add_parser("modulus", parents=[common], help="exact oscillation modulus of a function file")
    p.add_argument("--input", help="function JSON (default: built-in example)")
    p.add_argument("--order", type=int, required=True, help="even difference order 2k")
    p.add_argument("--scale", required=True, help="step bound h as p/q")
    p.add_argument(
        "--mode", choices=("pointwise", "relaxed"), default="pointwise"
    )
    p.set_defaults(handler=_cmd_modulus)

    p = sub.add_parser("bounds", parents=[common], help="two-sided constant bounds per half-order")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument(
        "--scan", type=int, default=0, help="also scan the order-2 bound on n offsets"
    )
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser(
        "steklov-check", parents=[common], help="randomized exact checks of the mean-value identities"
    )
    p.add_argument("--input", help="function JSON (default: built-in example)")
    p.add_argument("--k", type=int, required=True, help="half-order")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=_cmd_steklov_check)

    p = sub.add_parser(
        "random-test", parents=[common], help="ratio bound property test on random oscillating functions"
    )
    p.add_argument("--k", type=int, required=True, help="half-order")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=_cmd_random_test)

    p = sub.add_parser("search", parents=[common], help="certified ratio search over a fixed geometry")
    p.add_argument("--geometry", help="geometry JSON (default: shipped geometry)")
    p.add_argument("--rounds", type=int, default=24)
    p.add_argument("--out", help="write the certificate JSON here")
    p.set_defaults(handler=_cmd_search)

    p = sub.add_parser("plot-data", parents=[common], help="CSV samples and one-sided feature rows")
    p.add_argument("--input", help="function JSON (default: built-in example)")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_plot_data)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        report = args.handler(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    report.elapsed_seconds = round(time.perf_counter() - started, 6)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.render_text())
    return EXIT_OK if report.ok() else EXIT_VERIFICATION_FAILED


if __name__ == "__main__":
    sys.exit(main())
