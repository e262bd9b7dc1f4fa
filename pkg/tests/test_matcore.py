"""Matrix primitive tests: worked values, algebraic identities, and the
norm inequalities the bound calculators rely on."""

import numpy as np
import numpy.testing as npt
import pytest

from mdsmm import matcore
from mdsmm.errors import DimensionError, InputError


class TestConstructors:
    def test_as_matrix_accepts_lists(self):
        a = matcore.as_matrix([[1, 2], [3, 4]])
        assert a.dtype == float and a.shape == (2, 2)

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            matcore.as_matrix([[1.0, np.nan]])
        with pytest.raises(InputError):
            matcore.as_matrix([[np.inf, 1.0]])
        with pytest.raises(InputError):
            matcore.as_vector([1.0, -np.inf])

    def test_rejects_wrong_rank(self):
        with pytest.raises(DimensionError):
            matcore.as_matrix([1.0, 2.0])
        with pytest.raises(DimensionError):
            matcore.as_vector([[1.0]])


class TestNorms:
    def test_frobenius_zero(self):
        assert matcore.frobenius_norm(np.zeros((2, 2))) == 0.0

    def test_frobenius_identity(self):
        assert matcore.frobenius_norm(np.eye(2)) == pytest.approx(np.sqrt(2.0), rel=1e-15)

    def test_frobenius_direct_sum(self):
        # 1 + 4 + 9 + 16 = 30
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert matcore.frobenius_norm(a) == pytest.approx(np.sqrt(30.0), rel=1e-15)

    def test_induced_norms_identity(self):
        for n in (1, 3, 6):
            assert matcore.induced_norm_1(np.eye(n)) == 1.0
            assert matcore.induced_norm_inf(np.eye(n)) == 1.0

    def test_induced_norms_column_and_row_sums(self):
        a = np.array([[1.0, 4.0], [9.0, 16.0]])
        assert matcore.induced_norm_1(a) == 20.0  # column sums 10, 20
        assert matcore.induced_norm_inf(a) == 25.0  # row sums 5, 25

    def test_induced_norm_absolute_values(self):
        a = np.array([[-1.0, 0.0], [0.0, -3.0]])
        assert matcore.induced_norm_1(a) == 3.0


class TestInnerAndHadamard:
    def test_inner_with_zero(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert matcore.inner_product(a, np.zeros((2, 2))) == 0.0

    def test_inner_with_identity(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert matcore.inner_product(np.eye(2), a) == 5.0  # 1 + 4

    def test_inner_self_equals_squared_norm(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert matcore.inner_product(a, a) == pytest.approx(30.0, rel=1e-15)
        assert matcore.inner_product(a, a) == pytest.approx(
            matcore.frobenius_norm(a) ** 2, rel=1e-12
        )

    def test_inner_shape_mismatch(self):
        with pytest.raises(DimensionError):
            matcore.inner_product(np.eye(2), np.eye(3))

    def test_hadamard_ones_is_identity_element(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_array_equal(matcore.hadamard(a, np.ones((2, 2))), a)

    def test_hadamard_zero(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_array_equal(matcore.hadamard(a, np.zeros((2, 2))), np.zeros((2, 2)))

    def test_hadamard_squares(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_array_equal(
            matcore.hadamard(a, a), np.array([[1.0, 4.0], [9.0, 16.0]])
        )

    def test_hadamard_shape_mismatch(self):
        with pytest.raises(DimensionError):
            matcore.hadamard(np.eye(2), np.eye(3))


class TestMultiDistance:
    def test_zero_partner(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_array_equal(matcore.multi_distance(x, np.zeros((2, 2))), np.zeros(4))

    def test_identity_partner(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_array_equal(matcore.multi_distance(x, np.eye(2)), [1.0, 4.0, 1.0, 4.0])

    def test_all_ones(self):
        npt.assert_array_equal(
            matcore.multi_distance(np.ones((2, 2)), np.ones((2, 2))), [2.0, 2.0, 2.0, 2.0]
        )

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            matcore.multi_distance(np.eye(2), np.eye(3))

    def test_stack_matches_single(self):
        rng = np.random.default_rng(7)
        xs = rng.standard_normal((5, 3, 4))
        z = rng.standard_normal((3, 4))
        stacked = matcore.multi_distance_stack(xs, z)
        for i in range(5):
            npt.assert_allclose(stacked[i], matcore.multi_distance(xs[i], z), rtol=1e-15)

    def test_linearity_in_second_argument(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((4, 6))
        z1 = rng.standard_normal((4, 6))
        z2 = rng.standard_normal((4, 6))
        lhs = matcore.multi_distance(x, 2.5 * z1 - 0.75 * z2)
        rhs = 2.5 * matcore.multi_distance(x, z1) - 0.75 * matcore.multi_distance(x, z2)
        npt.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


class TestWeightMatrix:
    def test_zero_vector(self):
        npt.assert_array_equal(matcore.weight_matrix(np.zeros(5), 2, 3), np.zeros((2, 3)))

    def test_entrywise_sums(self):
        got = matcore.weight_matrix(np.array([1.0, 2.0, 3.0, 4.0]), 2, 2)
        npt.assert_array_equal(got, [[4.0, 5.0], [5.0, 6.0]])

    def test_all_ones_gives_twos(self):
        npt.assert_array_equal(matcore.weight_matrix(np.ones(7), 3, 4), np.full((3, 4), 2.0))

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            matcore.weight_matrix(np.ones(6), 3, 4)


class TestDecisionIdentity:
    """w @ multi_distance(X, Z) = <weight_matrix(w) * X, Z> = <weight_matrix(w) * Z, X>."""

    def test_random_instances(self):
        rng = np.random.default_rng(2024)
        for _ in range(300):
            m = int(rng.integers(1, 21))
            n = int(rng.integers(1, 21))
            x = rng.standard_normal((m, n))
            z = rng.standard_normal((m, n))
            w = rng.standard_normal(m + n)
            grid = matcore.weight_matrix(w, m, n)
            lhs = float(w @ matcore.multi_distance(x, z))
            mid = matcore.inner_product(matcore.hadamard(grid, x), z)
            rhs = matcore.inner_product(matcore.hadamard(grid, z), x)
            scale = max(abs(lhs), 1e-30)
            assert abs(lhs - mid) <= 1e-10 * scale
            assert abs(lhs - rhs) <= 1e-10 * scale


class TestCorrelationOperator:
    def test_zero_aggregate(self):
        z = np.ones((3, 2))
        npt.assert_array_equal(
            matcore.correlation_operator_apply(np.zeros((3, 2)), z), np.zeros(5)
        )

    def test_single_sample_is_multi_distance(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((4, 5))
        z = rng.standard_normal((4, 5))
        npt.assert_array_equal(
            matcore.correlation_operator_apply(x, z), matcore.multi_distance(x, z)
        )

    def test_adjoint_identity(self):
        # <T(Z), u> == <Z, adjoint(u)> for random aggregates
        rng = np.random.default_rng(17)
        for _ in range(200):
            m = int(rng.integers(1, 9))
            n = int(rng.integers(1, 9))
            a = rng.standard_normal((m, n))
            z = rng.standard_normal((m, n))
            u = rng.standard_normal(m + n)
            lhs = float(matcore.correlation_operator_apply(a, z) @ u)
            rhs = matcore.inner_product(z, matcore.correlation_operator_adjoint(a, u))
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)


class TestNormBounds:
    def test_multi_distance_norm_bound(self):
        # ||d(X, Z)||^2 <= (||X o X||_1 + ||X o X||_inf) ||Z||^2
        rng = np.random.default_rng(29)
        for _ in range(200):
            m = int(rng.integers(1, 12))
            n = int(rng.integers(1, 12))
            x = rng.standard_normal((m, n)) * rng.uniform(0.1, 5.0)
            z = rng.standard_normal((m, n))
            lhs = float(np.sum(matcore.multi_distance(x, z) ** 2))
            sq = matcore.hadamard(x, x)
            cap = (matcore.induced_norm_1(sq) + matcore.induced_norm_inf(sq)) * float(
                np.sum(z * z)
            )
            assert lhs <= cap * (1.0 + 1e-12)

    def test_radii_ordering(self):
        # ||X o X||_1 and ||X o X||_inf never exceed ||X||^2
        rng = np.random.default_rng(31)
        for _ in range(200):
            m = int(rng.integers(1, 12))
            n = int(rng.integers(1, 12))
            x = rng.standard_normal((m, n))
            sq = matcore.hadamard(x, x)
            total = matcore.frobenius_norm(x) ** 2
            assert matcore.induced_norm_1(sq) <= total * (1.0 + 1e-12)
            assert matcore.induced_norm_inf(sq) <= total * (1.0 + 1e-12)
