"""Dual solver tests: closed-form two-point solutions, feasibility and
monotonicity along the SMO path, budget behavior, and input validation."""

import numpy as np
import numpy.testing as npt
import pytest

from mdsmm.errors import DimensionError, InputError
from mdsmm.qpsolver import DualProblem, DualSolution, decision_values, solve_dual


def two_point_closed_form(k11, k22, k12, c):
    """For labels (+1, -1) both multipliers equal t* = clip(2/eta, 0, C)
    with eta = k11 + k22 - 2 k12; objective 2 t* - t*^2 eta / 2."""
    eta = k11 + k22 - 2.0 * k12
    t = min(max(2.0 / eta, 0.0), c) if eta > 0 else c
    return t, 2.0 * t - 0.5 * t * t * eta


class TestTwoPointProblems:
    def test_symmetric_pair(self):
        # scalar points +1 / -1, linear Gram
        p = DualProblem(
            kernel=np.array([[1.0, -1.0], [-1.0, 1.0]]),
            labels=np.array([1.0, -1.0]),
            cost=10.0,
        )
        s = solve_dual(p)
        npt.assert_allclose(s.alpha, [0.5, 0.5], atol=1e-12)
        assert s.bias == pytest.approx(0.0, abs=1e-12)
        assert s.max_kkt_violation <= p.kkt_tol
        # the induced margin function is f(x) = x: check on the training Gram
        npt.assert_allclose(decision_values(p, s, p.kernel), [1.0, -1.0], atol=1e-12)

    def test_random_pairs_match_closed_form(self):
        rng = np.random.default_rng(5)
        for i in range(50):
            v = rng.standard_normal((2, 3))
            k = v @ v.T
            k = 0.5 * (k + k.T)
            c = [0.1, 1.0, 10.0][i % 3]
            p = DualProblem(kernel=k, labels=np.array([1.0, -1.0]), cost=c, kkt_tol=1e-10)
            s = solve_dual(p)
            t, obj = two_point_closed_form(k[0, 0], k[1, 1], k[0, 1], c)
            npt.assert_allclose(s.alpha, [t, t], atol=1e-9)
            assert s.dual_objective == pytest.approx(obj, abs=1e-9)

    def test_box_collapse_with_tiny_cost(self):
        p = DualProblem(
            kernel=np.array([[1.0, -1.0], [-1.0, 1.0]]),
            labels=np.array([1.0, -1.0]),
            cost=1e-12,
        )
        s = solve_dual(p)
        assert np.all(s.alpha <= 1e-12)
        assert abs(s.dual_objective) <= 1e-11


class TestValidation:
    def test_single_class_rejected(self):
        with pytest.raises(InputError):
            DualProblem(kernel=np.eye(2), labels=np.array([1.0, 1.0]), cost=1.0)

    def test_non_symmetric_kernel_rejected(self):
        k = np.array([[1.0, 0.5], [0.25, 1.0]])
        with pytest.raises(InputError):
            DualProblem(kernel=k, labels=np.array([1.0, -1.0]), cost=1.0)

    def test_non_pm1_labels_rejected(self):
        with pytest.raises(InputError):
            DualProblem(kernel=np.eye(2), labels=np.array([1.0, 0.0]), cost=1.0)

    def test_non_square_kernel_rejected(self):
        with pytest.raises(DimensionError):
            DualProblem(kernel=np.ones((2, 3)), labels=np.array([1.0, -1.0]), cost=1.0)


def random_problem(rng, n_max=8, extra_cols=4):
    n = int(rng.integers(2, n_max + 1))
    while True:
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        if (y > 0).any() and (y < 0).any():
            break
    v = rng.standard_normal((n, n + extra_cols))
    k = v @ v.T
    return 0.5 * (k + k.T), y


class TestSmoPath:
    def test_equality_constraint_preserved_each_update(self):
        rng = np.random.default_rng(23)
        for i in range(20):
            k, y = random_problem(rng)
            c = [0.1, 1.0, 10.0][i % 3]
            p = DualProblem(kernel=k, labels=y, cost=c)
            sums = []
            solve_dual(p, on_update=lambda a: sums.append(float(a @ y)))
            assert sums, "solver should perform at least one update"
            assert max(abs(s) for s in sums) <= 1e-9 * c * len(y)

    def test_dual_objective_never_decreases(self):
        rng = np.random.default_rng(29)
        for i in range(20):
            k, y = random_problem(rng)
            c = [0.1, 1.0, 10.0][i % 3]
            p = DualProblem(kernel=k, labels=y, cost=c)
            values = []

            def record(alpha, k=k, y=y):
                coef = alpha * y
                values.append(float(alpha.sum() - 0.5 * coef @ k @ coef))

            solve_dual(p, on_update=record)
            drops = [b - a for a, b in zip(values, values[1:]) if b < a]
            assert not drops or min(drops) > -1e-10

    def test_weak_duality_against_primal(self):
        # reconstruct the primal from explicit features: primal >= dual - 1e-6
        rng = np.random.default_rng(37)
        for i in range(20):
            n = int(rng.integers(2, 9))
            feats = rng.standard_normal((n, 5))
            while True:
                y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
                if (y > 0).any() and (y < 0).any():
                    break
            k = feats @ feats.T
            c = [0.1, 1.0, 10.0][i % 3]
            p = DualProblem(kernel=0.5 * (k + k.T), labels=y, cost=c, kkt_tol=1e-6)
            s = solve_dual(p)
            w = feats.T @ (s.alpha * y)
            margins = y * (feats @ w + s.bias)
            primal = 0.5 * float(w @ w) + c * float(np.sum(np.maximum(0.0, 1.0 - margins)))
            assert primal >= s.dual_objective - 1e-6

    def test_budget_exhaustion_returns_best_iterate(self):
        rng = np.random.default_rng(41)
        k, y = random_problem(rng, n_max=8)
        p = DualProblem(kernel=k, labels=y, cost=10.0, max_passes=2)
        s = solve_dual(p)
        assert s.iterations == 2
        assert s.max_kkt_violation > p.kkt_tol
        assert np.all(s.alpha >= 0.0) and np.all(s.alpha <= 10.0)

    def test_deterministic(self):
        rng = np.random.default_rng(43)
        k, y = random_problem(rng)
        p = DualProblem(kernel=k, labels=y, cost=1.0)
        a = solve_dual(p)
        b = solve_dual(p)
        npt.assert_array_equal(a.alpha, b.alpha)
        assert a.bias == b.bias and a.iterations == b.iterations


class TestDecisionValues:
    def setup_method(self):
        self.problem = DualProblem(
            kernel=np.array([[1.0, -1.0], [-1.0, 1.0]]),
            labels=np.array([1.0, -1.0]),
            cost=10.0,
        )
        self.solution = solve_dual(self.problem)

    def test_training_set_values(self):
        npt.assert_allclose(
            decision_values(self.problem, self.solution, self.problem.kernel),
            [1.0, -1.0],
            atol=1e-12,
        )

    def test_zero_alpha_gives_constant_bias(self):
        s = DualSolution(
            alpha=np.zeros(2), bias=0.75, dual_objective=0.0, iterations=0,
            max_kkt_violation=0.0,
        )
        npt.assert_array_equal(
            decision_values(self.problem, s, np.ones((4, 2))), np.full(4, 0.75)
        )

    def test_duplicate_point_scores_identically(self):
        cross = np.array([[1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]])
        vals = decision_values(self.problem, self.solution, cross)
        assert vals[0] == vals[1]

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            decision_values(self.problem, self.solution, np.ones((3, 5)))
