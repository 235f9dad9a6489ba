"""Dense two-phase primal simplex over free variables.

Small, deterministic, dependency-light: the extremal search solves a few
hundred rows over a few dozen variables per round, so a dense float64
tableau with Bland's anti-cycling rule is entirely adequate, and keeping
the pivoting in-house makes the solver's behavior reproducible across
environments.  Exactness is not required here: every solution the search
accepts is re-verified in exact rational arithmetic downstream.

Variables are free (unrestricted in sign); the solver splits them into
positive and negative parts internally.  Constraints are given as
``(coefficients, relation, rhs)`` with relation one of ``"<="``, ``">="``,
``"=="``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError, SimplexStallError

RELATIONS = ("<=", ">=", "==")


@dataclass
class SimplexResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    objective: float
    values: Optional[np.ndarray]
    iterations: int


def _pivot(T: np.ndarray, cost: np.ndarray, basis: list, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    if cost[col] != 0.0:
        cost -= cost[col] * T[row]
    basis[row] = col


def _iterate(
    T: np.ndarray,
    cost: np.ndarray,
    basis: list,
    allowed: np.ndarray,
    tol: float,
    max_iterations: int,
    phase: int,
    start_count: int,
) -> tuple:
    """Run Bland-rule pivots until optimal or unbounded.

    ``allowed`` masks columns that may enter (artificials are barred in
    phase 2).  Returns ``(status, iterations)`` with status "optimal" or
    "unbounded"; raises :class:`SimplexStallError` past the iteration cap.
    """
    m, _ = T.shape
    count = start_count
    while True:
        entering = -1
        for j in np.flatnonzero(allowed):
            if cost[j] < -tol:
                entering = int(j)
                break
        if entering < 0:
            return ("optimal", count)
        leaving = -1
        best_ratio = np.inf
        for i in range(m):
            a = T[i, entering]
            if a > tol:
                ratio = T[i, -1] / a
                if ratio < best_ratio - tol or (
                    abs(ratio - best_ratio) <= tol
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            return ("unbounded", count)
        _pivot(T, cost, basis, leaving, entering)
        count += 1
        if count > max_iterations:
            raise SimplexStallError(count, phase)


def solve(
    objective: Sequence[float],
    constraints: Sequence,
    maximize: bool = True,
    tol: float = 1e-9,
    max_iterations: int = 50000,
) -> SimplexResult:
    """Optimize ``objective . x`` over free x subject to ``constraints``.

    Returns a :class:`SimplexResult`; ``values`` holds the original free
    variables at the optimum (None unless status is "optimal").
    """
    c_orig = np.asarray(objective, dtype=np.float64)
    n = len(c_orig)
    if n == 0:
        raise InvalidArgumentError("objective must have at least one variable")

    rows = []
    for coeffs, relation, rhs in constraints:
        if relation not in RELATIONS:
            raise InvalidArgumentError(f"relation must be one of {RELATIONS}, got {relation!r}")
        a = np.asarray(coeffs, dtype=np.float64)
        if a.shape != (n,):
            raise InvalidArgumentError(
                f"constraint width {a.shape} does not match {n} variables"
            )
        b = float(rhs)
        if b < 0.0:
            a, b = -a, -b
            relation = {"<=": ">=", ">=": "<=", "==": "=="}[relation]
        rows.append((a, relation, b))

    m = len(rows)
    n_slack = sum(1 for _, rel, _ in rows if rel != "==")
    art_rows = [i for i, (_, rel, _) in enumerate(rows) if rel != "<="]
    N = 2 * n + n_slack + len(art_rows)

    T = np.zeros((m, N + 1), dtype=np.float64)
    basis = [-1] * m
    slack_at = 2 * n
    art_at = 2 * n + n_slack
    for i, (a, rel, b) in enumerate(rows):
        T[i, :n] = a
        T[i, n : 2 * n] = -a
        T[i, -1] = b
        if rel == "<=":
            T[i, slack_at] = 1.0
            basis[i] = slack_at
            slack_at += 1
        elif rel == ">=":
            T[i, slack_at] = -1.0
            slack_at += 1
    for i in art_rows:
        T[i, art_at] = 1.0
        basis[i] = art_at
        art_at += 1

    iterations = 0
    artificial = np.zeros(N, dtype=bool)
    artificial[2 * n + n_slack :] = True

    if art_rows:
        phase_cost = np.zeros(N + 1, dtype=np.float64)
        phase_cost[2 * n + n_slack : N] = 1.0
        for i in art_rows:
            phase_cost -= T[i]  # reduced costs w.r.t. the artificial basis
        status, iterations = _iterate(T, phase_cost, basis, np.ones(N, dtype=bool),
                                      tol, max_iterations, 1, iterations)
        assert status == "optimal", "phase 1 objective is bounded below by zero"
        if -phase_cost[-1] > 1e-7:
            return SimplexResult("infeasible", np.nan, None, iterations)
        # Remove artificials still sitting in the basis at level zero.
        drop = []
        for i in range(m):
            if artificial[basis[i]]:
                candidates = np.flatnonzero(np.abs(T[i, : 2 * n + n_slack]) > tol)
                if len(candidates):
                    _pivot(T, phase_cost, basis, i, int(candidates[0]))
                    iterations += 1
                else:
                    drop.append(i)
        if drop:
            keep = [i for i in range(m) if i not in set(drop)]
            T = T[keep]
            basis = [basis[i] for i in keep]
            m = len(keep)

    c_int = np.zeros(N, dtype=np.float64)
    c_int[:n] = -c_orig if maximize else c_orig
    c_int[n : 2 * n] = c_orig if maximize else -c_orig
    cost = np.concatenate([c_int, [0.0]])
    for i in range(m):
        if cost[basis[i]] != 0.0:
            cost -= cost[basis[i]] * T[i]

    status, iterations = _iterate(T, cost, basis, ~artificial, tol, max_iterations, 2, iterations)
    if status == "unbounded":
        return SimplexResult("unbounded", np.inf if maximize else -np.inf, None, iterations)

    split = np.zeros(N, dtype=np.float64)
    for i in range(m):
        split[basis[i]] = T[i, -1]
    x = split[:n] - split[n : 2 * n]
    return SimplexResult("optimal", float(c_orig @ x), x, iterations)
