"""Tests for the dense two-phase simplex solver."""

import random

import pytest

from lp_bruteforce import solve_exact
from whitneylab.errors import SimplexStallError
from whitneylab.simplex import solve


class TestKnownProblems:
    def test_box_corner(self):
        result = solve(
            [1.0, 1.0],
            [([1.0, 0.0], "<=", 2.0), ([0.0, 1.0], "<=", 3.0)],
            maximize=True,
        )
        assert result.status == "optimal"
        assert result.objective == pytest.approx(5.0, abs=1e-9)
        assert result.values == pytest.approx([2.0, 3.0], abs=1e-9)

    def test_equality_row(self):
        result = solve(
            [1.0, 0.0],
            [
                ([1.0, 1.0], "==", 4.0),
                ([1.0, -1.0], "<=", 2.0),
                ([0.0, 1.0], ">=", 0.0),
            ],
            maximize=True,
        )
        assert result.status == "optimal"
        assert result.objective == pytest.approx(3.0, abs=1e-9)
        assert result.values == pytest.approx([3.0, 1.0], abs=1e-9)

    def test_minimize(self):
        result = solve(
            [2.0, 3.0],
            [
                ([1.0, 1.0], ">=", 4.0),
                ([1.0, 0.0], ">=", 0.0),
                ([0.0, 1.0], ">=", 0.0),
                ([1.0, 0.0], "<=", 10.0),
                ([0.0, 1.0], "<=", 10.0),
            ],
            maximize=False,
        )
        assert result.status == "optimal"
        assert result.objective == pytest.approx(8.0, abs=1e-9)

    def test_free_variable_goes_negative(self):
        result = solve(
            [-1.0],
            [([1.0], ">=", -5.0)],
            maximize=True,
        )
        assert result.status == "optimal"
        assert result.objective == pytest.approx(5.0, abs=1e-9)
        assert result.values == pytest.approx([-5.0], abs=1e-9)

    def test_degenerate_vertex(self):
        result = solve(
            [1.0, 1.0],
            [
                ([1.0, 0.0], "<=", 1.0),
                ([0.0, 1.0], "<=", 1.0),
                ([1.0, 1.0], "<=", 2.0),
                ([1.0, 0.0], ">=", 0.0),
                ([0.0, 1.0], ">=", 0.0),
            ],
            maximize=True,
        )
        assert result.status == "optimal"
        assert result.objective == pytest.approx(2.0, abs=1e-9)

    def test_objective_recomputed_from_point(self):
        result = solve(
            [3.0, -2.0],
            [
                ([1.0, 0.0], "<=", 4.0),
                ([0.0, 1.0], ">=", 1.0),
                ([0.0, 1.0], "<=", 5.0),
                ([1.0, 0.0], ">=", 0.0),
            ],
            maximize=True,
        )
        assert result.status == "optimal"
        x, y = result.values
        assert result.objective == pytest.approx(3.0 * x - 2.0 * y, abs=1e-12)
        assert result.objective == pytest.approx(10.0, abs=1e-9)


class TestEdgeCases:
    def test_infeasible(self):
        result = solve(
            [1.0],
            [([1.0], "<=", 1.0), ([1.0], ">=", 2.0)],
        )
        assert result.status == "infeasible"
        assert result.values is None

    def test_unbounded(self):
        result = solve(
            [1.0],
            [([1.0], ">=", 0.0)],
            maximize=True,
        )
        assert result.status == "unbounded"
        assert result.objective == float("inf")

    def test_unbounded_minimize(self):
        result = solve(
            [1.0],
            [([1.0], "<=", 0.0)],
            maximize=False,
        )
        assert result.status == "unbounded"
        assert result.objective == float("-inf")

    def test_stall_raises(self):
        with pytest.raises(SimplexStallError) as info:
            solve(
                [1.0, 1.0],
                [([1.0, 0.0], "<=", 2.0), ([0.0, 1.0], "<=", 3.0)],
                max_iterations=1,
            )
        assert info.value.iterations >= 1

    def test_redundant_equalities(self):
        result = solve(
            [1.0, 1.0],
            [
                ([1.0, 1.0], "==", 2.0),
                ([2.0, 2.0], "==", 4.0),
                ([1.0, 0.0], ">=", 0.0),
                ([0.0, 1.0], ">=", 0.0),
            ],
            maximize=True,
        )
        assert result.status == "optimal"
        assert result.objective == pytest.approx(2.0, abs=1e-9)

    def test_zero_objective(self):
        result = solve(
            [0.0, 0.0],
            [([1.0, 0.0], "<=", 1.0), ([0.0, 1.0], "<=", 1.0)],
        )
        assert result.status == "optimal"
        assert result.objective == pytest.approx(0.0, abs=1e-12)


class TestAgainstBruteForce:
    def _random_problem(self, rng, n):
        constraints = []
        for _ in range(rng.randint(2, 5)):
            coeffs = [float(rng.randint(-4, 4)) for _ in range(n)]
            rel = rng.choice(["<=", ">="])
            rhs = float(rng.randint(-6, 6))
            constraints.append((coeffs, rel, rhs))
        for i in range(n):
            box = [0.0] * n
            box[i] = 1.0
            constraints.append((list(box), "<=", 8.0))
            constraints.append((list(box), ">=", -8.0))
        objective = [float(rng.randint(-5, 5)) for _ in range(n)]
        return objective, constraints

    def test_random_bounded_problems(self):
        rng = random.Random(20260819)
        checked = 0
        for _ in range(40):
            n = rng.randint(2, 3)
            objective, constraints = self._random_problem(rng, n)
            maximize = rng.random() < 0.5
            result = solve(objective, constraints, maximize=maximize)
            oracle = solve_exact(objective, constraints, maximize=maximize)
            if oracle is None:
                assert result.status == "infeasible"
            else:
                assert result.status == "optimal"
                assert result.objective == pytest.approx(float(oracle[0]), abs=1e-7)
                checked += 1
        assert checked >= 10

    def test_random_with_equality(self):
        rng = random.Random(7)
        for _ in range(20):
            n = 3
            objective, constraints = self._random_problem(rng, n)
            coeffs = [float(rng.randint(-3, 3)) for _ in range(n)]
            if all(c == 0.0 for c in coeffs):
                coeffs[0] = 1.0
            constraints.append((coeffs, "==", float(rng.randint(-4, 4))))
            result = solve(objective, constraints, maximize=True)
            oracle = solve_exact(objective, constraints, maximize=True)
            if oracle is None:
                assert result.status == "infeasible"
            else:
                assert result.status == "optimal"
                assert result.objective == pytest.approx(float(oracle[0]), abs=1e-7)
