import numpy as np
import pytest

from drazin.densela import (
    EigenConvergenceError,
    RankDeficientError,
    hessenberg_eig,
    matvec,
    mgs_orthogonalize,
    power_apply,
    qr_factor,
    rank_of,
    solve_upper_triangular,
)


class TestMatvec:
    def test_identity(self):
        x = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(matvec(np.eye(3), x), x)

    def test_example4_product_against_elementwise_oracle(self, ex4):
        A, b, _ = ex4
        n = A.shape[0]
        expected = np.array([sum(A[i, j] * b[j] for j in range(n)) for i in range(n)])
        got = matvec(A, b)
        assert np.allclose(got, expected, atol=0, rtol=0)
        assert np.allclose(got, [4, 10, 1, 0])

    def test_zero_matrix(self):
        assert np.allclose(matvec(np.zeros((3, 3)), [1, -2, 5]), 0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            matvec(np.eye(3), [1.0, 2.0])

    def test_rejects_nonfinite(self):
        A = np.eye(2)
        A[0, 0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            matvec(A, [1.0, 1.0])


class TestPowerApply:
    def test_zero_power_is_identity(self):
        x = np.array([2.0, -1.0])
        assert np.array_equal(power_apply(np.ones((2, 2)), 0, x), x)

    def test_example1_square_kills_nilpotent_block(self, ex1):
        A, b, _ = ex1
        got = power_apply(A, 2, b)
        expected = A @ (A @ b)
        assert np.allclose(got, expected)
        assert got[10] == 0 and got[11] == 0
        assert np.allclose(got.real, [4, 3, 1, 16, 15, 9, 49, 64, 99, 81, 0, 0])

    def test_nilpotent_square_is_zero(self):
        N = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert np.allclose(power_apply(N, 2, [3.0, 4.0]), 0)

    def test_requires_square(self):
        with pytest.raises(ValueError, match="square"):
            power_apply(np.ones((2, 3)), 1, [1.0, 2.0, 3.0])

    def test_rejects_negative_power(self):
        with pytest.raises(ValueError, match="nonnegative"):
            power_apply(np.eye(2), -1, [1.0, 2.0])


class TestMgsOrthogonalize:
    def test_vector_in_span_breaks_down(self):
        V = np.array([[1.0], [0.0]])
        h, hnext, vnext = mgs_orthogonalize(V, [2.0, 0.0])
        assert vnext is None
        assert h[0] == pytest.approx(2.0)
        assert hnext <= 1e-13 * 2.0

    def test_two_dimensional_hand_case(self):
        V = np.array([[1.0], [0.0]])
        h, hnext, vnext = mgs_orthogonalize(V, [1.0, 1.0])
        assert h[0] == pytest.approx(1.0)
        assert hnext == pytest.approx(1.0)
        assert np.allclose(vnext, [0.0, 1.0])

    def test_empty_basis(self):
        h, hnext, vnext = mgs_orthogonalize(None, [3.0, 4.0])
        assert h.size == 0
        assert hnext == pytest.approx(5.0)
        assert np.allclose(vnext, [0.6, 0.8])

    def test_reorthogonalization_keeps_basis_orthonormal(self):
        # grow a basis from nearly dependent vectors; orthonormality must hold
        rng = np.random.default_rng(7)
        n = 40
        cols = []
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        cols.append(v / np.linalg.norm(v))
        for _ in range(15):
            w = cols[-1] + 1e-9 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
            _, _, vnext = mgs_orthogonalize(np.column_stack(cols), w)
            assert vnext is not None
            cols.append(vnext)
        V = np.column_stack(cols)
        assert np.linalg.norm(V.conj().T @ V - np.eye(V.shape[1])) <= 1e-10


class TestQrFactor:
    def test_upper_triangular_positive_diagonal_is_fixed_point(self):
        M = np.array([[2.0, 1.0], [0.0, 3.0]])
        Q, R = qr_factor(M)
        assert np.allclose(Q, np.eye(2), atol=1e-14)
        assert np.allclose(R, M, atol=1e-14)

    def test_single_column(self):
        Q, R = qr_factor([[0.0], [1.0]])
        assert np.allclose(R, [[1.0]])
        assert np.allclose(Q, [[0.0], [1.0]])

    @pytest.mark.parametrize("shape", [(5, 3), (30, 30), (60, 20), (200, 120)])
    def test_orthonormality_and_reconstruction(self, shape):
        rng = np.random.default_rng(sum(shape))
        M = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        Q, R = qr_factor(M)
        assert np.linalg.norm(Q.conj().T @ Q - np.eye(shape[1])) <= 1e-12
        assert np.linalg.norm(M - Q @ R) <= 1e-12 * np.linalg.norm(M)
        assert np.allclose(R, np.triu(R))

    def test_rejects_wide_matrix(self):
        with pytest.raises(ValueError, match="rows >= cols"):
            qr_factor(np.ones((2, 3)))


class TestSolveUpperTriangular:
    def test_identity(self):
        c = np.array([1.0, -2.0, 3.0])
        assert np.allclose(solve_upper_triangular(np.eye(3), c), c)

    def test_hand_case(self):
        R = np.array([[2.0, 1.0], [0.0, 4.0]])
        y = solve_upper_triangular(R, [4.0, 8.0])
        assert np.allclose(y, [1.0, 2.0])

    def test_round_trip_through_qr(self):
        rng = np.random.default_rng(11)
        M = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        x_true = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        Q, R = qr_factor(M)
        y = solve_upper_triangular(R, Q.conj().T @ (M @ x_true))
        assert np.linalg.norm(y - x_true) <= 1e-10 * np.linalg.norm(x_true)

    def test_residual_bound(self):
        rng = np.random.default_rng(12)
        R = np.triu(rng.standard_normal((10, 10))) + 5 * np.eye(10)
        c = rng.standard_normal(10)
        y = solve_upper_triangular(R, c)
        assert np.linalg.norm(R @ y - c) <= 1e-12 * np.linalg.norm(R) * np.linalg.norm(y)

    def test_near_zero_diagonal_raises_with_index(self):
        R = np.array([[1.0, 2.0], [0.0, 1e-18]])
        with pytest.raises(RankDeficientError) as exc:
            solve_upper_triangular(R, [1.0, 1.0])
        assert exc.value.index == 1


class TestHessenbergEig:
    def test_diagonal_matrix(self):
        H = np.diag([3.0, 1.0, 2.0])
        pairs = hessenberg_eig(H)
        values = sorted(lam.real for lam, _ in pairs)
        assert np.allclose(values, [1.0, 2.0, 3.0], atol=1e-12)
        for lam, v in pairs:
            assert np.linalg.norm(H @ v - lam * v) <= 1e-12 * np.linalg.norm(H)
            assert np.max(np.abs(v)) == pytest.approx(1.0, abs=1e-10)

    def test_jordan_block_at_zero(self):
        H = np.array([[0.0, 1.0], [0.0, 0.0]])
        pairs = hessenberg_eig(H)
        assert len(pairs) == 2
        for lam, v in pairs:
            assert abs(lam) <= 1e-12
            assert np.linalg.norm(H @ v - lam * v) <= 1e-8 * np.linalg.norm(H)

    def test_companion_matrix_cubic(self):
        # companion form of x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        C = np.array([[0.0, 0.0, 6.0],
                      [1.0, 0.0, -11.0],
                      [0.0, 1.0, 6.0]])
        values = sorted(lam.real for lam, _ in hessenberg_eig(C))
        assert np.allclose(values, [1.0, 2.0, 3.0], atol=1e-10)

    def test_residual_bound_random_hessenberg(self):
        rng = np.random.default_rng(23)
        n = 30
        H = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), -1)
        norm_h = np.linalg.norm(H)
        pairs = hessenberg_eig(H)
        assert len(pairs) == n
        for lam, v in pairs:
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.norm(H @ v - lam * v) <= 1e-8 * norm_h

    def test_eigenvalues_invariant_under_unitary_diagonal_similarity(self):
        rng = np.random.default_rng(29)
        n = 12
        H = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), -1)
        phases = np.exp(2j * np.pi * rng.uniform(size=n))
        D = np.diag(phases)
        H2 = D @ H @ D.conj().T
        lam1 = sorted((lam for lam, _ in hessenberg_eig(H)), key=lambda z: (z.real, z.imag))
        lam2 = sorted((lam for lam, _ in hessenberg_eig(H2)), key=lambda z: (z.real, z.imag))
        assert np.allclose(lam1, lam2, atol=1e-8 * np.linalg.norm(H))

    def test_dimension_cap(self):
        with pytest.raises(ValueError, match="eig_max_dim"):
            hessenberg_eig(np.eye(201))

    def test_rejects_non_hessenberg(self):
        M = np.ones((4, 4))
        with pytest.raises(ValueError, match="Hessenberg"):
            hessenberg_eig(M)

    def test_nonconvergence_carries_partial_results(self):
        H = np.diag([1.0, 2.0, 3.0]).astype(complex)
        H[1, 0] = 1.0
        H[2, 1] = 1.0
        with pytest.raises(EigenConvergenceError) as exc:
            hessenberg_eig(H, max_sweeps=0)
        assert isinstance(exc.value.partial_values, list)


class TestRankOf:
    def test_zero_matrix(self):
        assert rank_of(np.zeros((3, 3)), 1e-10) == 0

    def test_identity(self):
        assert rank_of(np.eye(4), 1e-10) == 4

    def test_example4_matrix(self, ex4):
        A, _, _ = ex4
        assert rank_of(A, 1e-10) == 3

    def test_outer_product(self):
        u = np.arange(1.0, 6.0)
        assert rank_of(np.outer(u, u), 1e-10) == 1

    def test_requires_positive_tolerance(self):
        with pytest.raises(ValueError, match="positive"):
            rank_of(np.eye(2), 0.0)
