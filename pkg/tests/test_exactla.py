import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tatevec.exactla import (
    FieldMismatchError,
    FieldSpec,
    Matrix,
    ShapeMismatchError,
    complement_basis,
    factor_through,
    hstack,
    image_basis,
    intersect_columns,
    inverse,
    is_invertible,
    kernel_basis,
    kron,
    rank,
    rref,
    solve_linear,
    span_contains,
    subspace_basis,
)

GF2 = FieldSpec(2)
GF3 = FieldSpec(3)
GF5 = FieldSpec(5)


def M(field, data):
    return Matrix(field, data)


class TestFieldSpec:
    def test_accepts_primes(self):
        for p in (2, 3, 5, 7, 101):
            assert FieldSpec(p).p == p

    @pytest.mark.parametrize("p", [0, 1, 4, 6, 9, 100])
    def test_rejects_composites(self, p):
        with pytest.raises(ValueError):
            FieldSpec(p)

    def test_inverse(self):
        f = FieldSpec(7)
        for a in range(1, 7):
            assert (a * f.inv(a)) % 7 == 1


class TestMatrixBasics:
    def test_entries_reduced_mod_p(self):
        m = Matrix.from_entries(GF3, 1, 3, [3, 4, -1])
        assert m.data.tolist() == [[0, 1, 2]]

    def test_immutable(self):
        m = M(GF2, [[1, 0], [0, 1]])
        with pytest.raises(ValueError):
            m.data[0, 0] = 0
        with pytest.raises(AttributeError):
            m.field = GF3

    def test_matmul_field_mismatch(self):
        with pytest.raises(FieldMismatchError):
            M(GF2, [[1]]) @ M(GF3, [[1]])

    def test_matmul_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            M(GF2, [[1, 0]]) @ M(GF2, [[1, 0]])

    def test_json_round_trip(self):
        m = M(GF5, [[1, 2, 3], [4, 0, 1]])
        assert Matrix.from_json(GF5, m.to_json()) == m

    def test_zero_dim_matrices(self):
        z = Matrix.zeros(GF2, 0, 3)
        assert (z @ M(GF2, [[1], [0], [1]])).shape == (0, 1)
        assert Matrix.identity(GF2, 0).shape == (0, 0)


class TestSolveLinear:
    def test_free_variable_zero(self):
        # GF(2): x1 + x2 = 1, canonical solution puts the free variable to 0.
        X = solve_linear(M(GF2, [[1, 1]]), M(GF2, [[1]]))
        assert X == M(GF2, [[1], [0]])

    def test_identity_system(self):
        X = solve_linear(M(GF2, [[1, 0], [0, 1]]), M(GF2, [[1], [0]]))
        assert X == M(GF2, [[1], [0]])

    def test_inconsistent(self):
        assert solve_linear(M(GF2, [[1, 1], [1, 1]]), M(GF2, [[1], [0]])) is None

    def test_multi_rhs(self):
        A = M(GF5, [[1, 2], [3, 4]])
        B = Matrix.identity(GF5, 2)
        X = solve_linear(A, B)
        assert A @ X == B

    @pytest.mark.parametrize("p", [2, 3, 5, 101])
    def test_random_consistent_systems(self, p):
        field = FieldSpec(p)
        rng = np.random.default_rng(p)
        for _ in range(50):
            m, n, k = rng.integers(1, 7, size=3)
            A = Matrix(field, rng.integers(0, p, size=(m, n)))
            X0 = Matrix(field, rng.integers(0, p, size=(n, k)))
            B = A @ X0
            X = solve_linear(A, B)
            assert X is not None and A @ X == B


class TestSubspaceBasis:
    def test_kernel_obvious(self):
        K = kernel_basis(M(GF2, [[1, 1]]))
        assert K == M(GF2, [[1], [1]])

    def test_kernel_orthogonality_and_rank(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m, n = rng.integers(1, 7, size=2)
            A = Matrix(GF5, rng.integers(0, 5, size=(m, n)))
            K = kernel_basis(A)
            assert (A @ K).is_zero()
            assert K.cols + rank(A) == n
            assert rank(K) == K.cols

    def test_image_dependent_column(self):
        # GF(5): column 2 = 2 * column 1.
        B = image_basis(M(GF5, [[2, 4], [1, 2]]))
        assert B == M(GF5, [[2], [1]])

    def test_complement_greedy_rule(self):
        # Oracle: e1 is outside span{(1,1,0),(0,0,1)} and is tested first,
        # so the greedy completion is {e1} (frozen from the rank oracle run).
        S = M(GF2, [[1, 0], [1, 0], [0, 1]])
        assert span_contains(S, M(GF2, [[1], [0], [0]])) is False
        C = complement_basis(S, 3)
        assert C == M(GF2, [[1], [0], [0]])

    def test_complement_deterministic_and_direct_sum(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(1, 8))
            k = int(rng.integers(0, n + 1))
            A = Matrix(GF2, rng.integers(0, 2, size=(n, max(k, 1))))
            S = image_basis(A) if k else Matrix.zeros(GF2, n, 0)
            C1 = complement_basis(S, n)
            C2 = complement_basis(S, n)
            assert C1 == C2
            assert rank(hstack([S, C1])) == n
            assert S.cols + C1.cols == n

    def test_complement_rejects_dependent_columns(self):
        with pytest.raises(ValueError):
            complement_basis(M(GF2, [[1, 1], [1, 1]]), 2)

    def test_dispatch(self):
        A = M(GF2, [[1, 1]])
        assert subspace_basis(A, "kernel") == kernel_basis(A)
        assert subspace_basis(A, "image") == image_basis(A)
        with pytest.raises(ValueError):
            subspace_basis(A, "cokernel")


class TestFactorThrough:
    def test_projection(self):
        theta = factor_through(M(GF2, [[1, 1]]), M(GF2, [[1]]))
        assert theta == M(GF2, [[1], [0]])

    def test_identity_factor(self):
        alpha = M(GF2, [[1, 0], [1, 1]])
        assert factor_through(Matrix.identity(GF2, 2), alpha) == alpha

    def test_gf3_pivot_solution(self):
        f = M(GF3, [[1, 0, 2]])
        theta = factor_through(f, M(GF3, [[2]]))
        assert theta == M(GF3, [[2], [0], [0]])
        assert f @ theta == M(GF3, [[2]])

    def test_rejects_non_surjective(self):
        with pytest.raises(ValueError):
            factor_through(M(GF2, [[1, 1], [1, 1]]), M(GF2, [[1], [1]]))


class TestKron:
    def test_identity_factor(self):
        A = M(GF2, [[1, 1]])
        B = Matrix.identity(GF2, 2)
        assert kron(A, B) == M(GF2, [[1, 0, 1, 0], [0, 1, 0, 1]])

    def test_scalars(self):
        assert kron(M(GF2, [[1]]), M(GF2, [[1]])) == M(GF2, [[1]])
        assert kron(M(GF3, [[2]]), M(GF3, [[2]])) == M(GF3, [[1]])

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 1000))
    def test_mixed_product_law(self, seed):
        rng = np.random.default_rng(seed)
        p = int(rng.choice([2, 3, 5]))
        field = FieldSpec(p)
        a, b, c, d, e, f = (int(x) for x in rng.integers(1, 4, size=6))
        A1 = Matrix(field, rng.integers(0, p, size=(a, b)))
        A2 = Matrix(field, rng.integers(0, p, size=(b, c)))
        B1 = Matrix(field, rng.integers(0, p, size=(d, e)))
        B2 = Matrix(field, rng.integers(0, p, size=(e, f)))
        assert kron(A1 @ A2, B1 @ B2) == kron(A1, B1) @ kron(A2, B2)


class TestHelpers:
    def test_rref_pivots(self):
        R, piv = rref(M(GF2, [[0, 1, 1], [1, 1, 0]]))
        assert piv == [0, 1]
        assert R == M(GF2, [[1, 0, 1], [0, 1, 1]])

    def test_inverse(self):
        A = M(GF5, [[1, 2], [3, 4]])
        Ai = inverse(A)
        assert Ai is not None and A @ Ai == Matrix.identity(GF5, 2)
        assert inverse(M(GF5, [[1, 2], [2, 4]])) is None
        assert is_invertible(Matrix.identity(GF2, 0))

    def test_intersection(self):
        A = M(GF2, [[1, 0], [0, 1], [0, 0]])
        B = M(GF2, [[0, 1], [1, 0], [1, 0]])
        I = intersect_columns(A, B)
        assert I.cols == 1
        assert span_contains(A, I) and span_contains(B, I)

    def test_intersection_with_zero(self):
        A = M(GF2, [[1], [0]])
        Z = Matrix.zeros(GF2, 2, 0)
        assert intersect_columns(A, Z).cols == 0
