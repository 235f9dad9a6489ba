"""Acceptance gate: eight criteria, one verdict line each.

Each test prints ``criterion N: PASS/FAIL - detail`` (visible with ``-s``
or on failure) and enforces the pinned tolerances and runtime budgets.
Verdicts are honest: a criterion that cannot be met by the mathematics is
allowed to fail here rather than being weakened silently.  The one soft
clause (criterion 3) is satisfied by the mandated fallback: the exact
relaxed modulus of the stock example is 43/37, not 1, so the verifier must
emit the witness and exit nonzero, which is exactly what is asserted.
"""

import json
import math
import random
import time

from whitneylab.bounds import (
    central_binomial,
    combined_upper_bound,
    harmonic,
    shrunk_step_one_sided_term,
    upper_bound_scan,
    whitney_bounds,
)
from whitneylab.cli import EXIT_VERIFICATION_FAILED, main
from whitneylab.differences import (
    central_difference,
    modulus_both,
    modulus_exact,
    modulus_grid,
    whitney_ratio,
)
from whitneylab.errors import RequiresGenericPointError
from whitneylab.extremal import (
    build_lp,
    make_geometry,
    replay_certificate,
    search,
    shipped_geometry,
    solve_lp,
)
from whitneylab.funcspace import (
    extremal_example,
    random_oscillating,
    save_function,
    signed_integral,
    spike_function,
    sup_norm,
)
from whitneylab.rational import is_integer, rat, rat_float, rat_str
from whitneylab.steklov import (
    check_integer_point_identity,
    check_integral_factorization,
    check_integral_representation,
    check_product_identity,
    check_remainder_decomposition,
)

RATIO_SLACK = rat(1, 10**9)
FLOAT_SLACK = 1e-9


def _conclude(number: int, ok: bool, detail: str, elapsed: float, budget: float):
    within = elapsed < budget
    verdict = "PASS" if (ok and within) else "FAIL"
    line = f"criterion {number}: {verdict} - {detail} [{elapsed:.2f}s / budget {budget:.0f}s]"
    print(line)
    assert ok, line
    assert within, line


def test_criterion_1_bound_tables(capsys):
    started = time.perf_counter()
    code = main(["bounds", "--kmax", "8", "--json"])
    doc = json.loads(capsys.readouterr().out)
    results = doc["results"]
    ok = code == 0
    ok = ok and (results["k1_lower"], results["k1_upper"]) == ("1/2", "1/1")
    ok = ok and (results["k2_lower"], results["k2_upper"]) == ("1/6", "5/12")
    ok = ok and (results["k3_lower"], results["k3_upper"]) == ("1/20", "17/120")
    for k in range(2, 9):
        ok = ok and rat(results[f"k{k}_lower"]) < rat(results[f"k{k - 1}_lower"])
        ok = ok and rat(results[f"k{k}_upper"]) < rat(results[f"k{k - 1}_upper"])
    _conclude(
        1,
        ok,
        "bound table exact for k=1..3 and monotone to k=8",
        time.perf_counter() - started,
        1.0,
    )


def test_criterion_2_spike_ratio():
    started = time.perf_counter()
    ok = True
    got = []
    for k in (1, 2, 3, 4):
        f = spike_function(rat(1, 3), 1)
        ratio = whitney_ratio(f, k, 1, "relaxed")
        got.append(rat_str(ratio))
        ok = ok and ratio == rat(1, central_binomial(k))
    _conclude(
        2,
        ok,
        f"isolated-jump ratios {', '.join(got)} equal 1/binomial for k=1..4",
        time.perf_counter() - started,
        5.0,
    )


def test_criterion_3_stock_example(capsys):
    started = time.perf_counter()
    f = extremal_example()
    ok = all(signed_integral(f, j, j + 1) == 0 for j in (-1, 0, 1))

    norm = sup_norm(f)
    ok = ok and norm.value == rat(43, 74) and norm.position == rat(1, 4)

    both = modulus_both(f, 2, 1)
    pw = both["pointwise"]
    ok = ok and pw.value == rat(62, 37)
    ok = ok and (pw.witness.x, pw.witness.t) == (rat(1, 4), rat(1, 1))

    # two hand-checkable limit configurations, each of absolute value 1
    w1 = central_difference(f, 2, 0, rat(1, 4), ("below", "exact", "above"))
    w2 = central_difference(f, 2, 1, rat(1, 4), ("above", "exact", "below"))
    ok = ok and abs(w1) == 1 and abs(w2) == 1
    ok = ok and both["relaxed"].value >= 1

    # soft clause: the exact relaxed modulus exceeds 1, so the verifier is
    # required to surface the witness and exit nonzero instead of hiding it
    relaxed_is_one = both["relaxed"].value == 1
    code = main(["verify-example", "--json"])
    doc = json.loads(capsys.readouterr().out)
    if relaxed_is_one:
        ok = ok and code == 0
        note = "relaxed modulus exactly 1"
    else:
        ok = ok and code == EXIT_VERIFICATION_FAILED
        ok = ok and "discrepancy" in doc["results"]
        ok = ok and doc["results"]["relaxed_witness_x"] == rat_str(
            both["relaxed"].witness.x
        )
        note = (
            f"relaxed modulus {rat_str(both['relaxed'].value)} > 1; "
            "witness emitted and run exits 1 as required"
        )
    _conclude(
        3,
        ok,
        f"integrals, norm 43/74, pointwise 62/37 at (1/4, 1); {note}",
        time.perf_counter() - started,
        10.0,
    )


def test_criterion_4_refined_constants():
    started = time.perf_counter()
    scan = upper_bound_scan(4000)
    ok = scan.value <= rat(5, 8)

    combined = combined_upper_bound()
    ok = ok and abs(combined.x0 - (2.0 - math.sqrt(3.0))) < FLOAT_SLACK
    ok = ok and abs(combined.value - (7.0 * math.sqrt(3.0) - 11.5)) < FLOAT_SLACK
    ok = ok and round(combined.value, 4) == 0.6244
    ok = ok and round(rat_float(rat(5, 8)), 4) == 0.625

    ok = ok and shrunk_step_one_sided_term(rat(1, 3)) == rat(5, 18)
    _conclude(
        4,
        ok,
        f"scan <= 5/8, crossing x0 = {combined.x0:.9f}, value = {combined.value:.9f}, "
        "pre-halving term 5/18",
        time.perf_counter() - started,
        5.0,
    )


def _identity_battery(k: int, rng: random.Random, per_identity: int) -> dict:
    failures = {}
    pool = [
        random_oscillating(rng.randint(1, 10**6), 1, complexity=1 + i % 2)
        for i in range(6)
    ]

    def note(kind, outcome):
        if not outcome:
            failures[kind] = failures.get(kind, 0) + 1

    for i in range(per_identity):
        f = pool[i % len(pool)]
        for _ in range(64):
            query = [rat(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(4)]
            try:
                note("representation", check_integral_representation(f, k, *query).equal)
                break
            except RequiresGenericPointError:
                continue

        while True:
            x = rat(rng.randint(-30, 30), rng.randint(1, 7))
            if not (is_integer(x) and -k <= x <= k):
                break
        note("factorization", check_integral_factorization(f, k, x).equal)

        x = rat(rng.randint(-30, 30), rng.randint(1, 9))
        note("decomposition", check_remainder_decomposition(f, k, x).equal)

        lo, hi = f.support()
        j = rng.randint(int(lo) - 1, int(hi) + 1)
        note("integer-point", check_integer_point_identity(f, k, j).equal)

        x = rat(rng.randint(-99, 99), rng.randint(1, 13))
        note("product", check_product_identity(x, k).equal)
    return failures


def test_criterion_5_identity_suite():
    started = time.perf_counter()
    rng = random.Random(20260819)
    failures = {}
    for k in (1, 2, 3):
        for kind, count in _identity_battery(k, rng, 100).items():
            failures[kind] = failures.get(kind, 0) + count
    _conclude(
        5,
        not failures,
        "5 identities x 100 randomized exact checks x k in {1,2,3}, "
        f"failures: {failures or 'none'}",
        time.perf_counter() - started,
        60.0,
    )


def test_criterion_6_ratio_property(tmp_path):
    started = time.perf_counter()
    rng = random.Random(8191)
    violations = []
    for i in range(200):
        f = random_oscillating(rng.randint(1, 10**6), 1, complexity=1 + i % 2)
        k = (1, 2, 3)[i % 3]
        cap = whitney_bounds(k).upper
        norm = sup_norm(f).value
        both = modulus_both(f, 2 * k, 1)
        for mode in ("pointwise", "relaxed"):
            ratio = norm / both[mode].value
            if ratio > cap:
                path = tmp_path / f"counterexample_{i}_{mode}.json"
                save_function(f, path)
                violations.append((i, k, mode, rat_str(ratio), str(path)))
    _conclude(
        6,
        not violations,
        f"200 random functions x k in {{1,2,3}}, both modes; violations: "
        f"{violations or 'none'}",
        time.perf_counter() - started,
        300.0,
    )


def test_criterion_7_search_reproduction():
    started = time.perf_counter()
    geometry = shipped_geometry()
    report = search(geometry)
    cert = report.certificate
    target = rat(43, 74) - RATIO_SLACK
    ok = cert.ratio >= target
    ok = ok and replay_certificate(cert)
    _conclude(
        7,
        ok,
        f"certified ratio {rat_str(cert.ratio)} = {rat_float(cert.ratio):.9f} "
        f">= 43/74 - 1e-9 = {rat_float(target):.9f}; replay exact",
        time.perf_counter() - started,
        120.0,
    )


def test_criterion_8_oracle_equivalence():
    started = time.perf_counter()
    from lp_bruteforce import solve_exact

    toy = make_geometry(1, 1, ["0", "1"], [], "0")
    lp = build_lp(toy)
    simplex = solve_lp(lp)
    exact_rows = [
        (list(row.coefficients), row.relation, row.rhs) for row in lp.constraints
    ]
    brute = solve_exact(list(lp.objective), exact_rows, maximize=True)
    ok = simplex.status == "optimal" and brute is not None
    ok = ok and abs(simplex.objective - float(brute[0])) < FLOAT_SLACK

    rng = random.Random(16127)
    worst_gap = -1.0
    for i in range(20):
        f = random_oscillating(rng.randint(1, 10**6), 1, complexity=1 + i % 2)
        k = 1 + i % 2
        sampled = modulus_grid(f, 2 * k, 1, 4096)
        certified = rat_float(modulus_exact(f, 2 * k, 1, "relaxed").value)
        worst_gap = max(worst_gap, sampled - certified)
        ok = ok and sampled <= certified + FLOAT_SLACK
    _conclude(
        8,
        ok,
        f"toy LP simplex {simplex.objective:.12f} vs brute force "
        f"{float(brute[0]):.12f}; grid oracle max(sampled - exact) = {worst_gap:.3g}",
        time.perf_counter() - started,
        120.0,
    )
