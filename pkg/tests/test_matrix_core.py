import numpy as np
import pytest

from nlcs.matrix_core import (
    as_matrix,
    as_vector,
    extreme_eigenvalues,
    gaussian_matrix,
    random_sparse_signal,
    rank,
    read_matrix,
    read_vector,
    solve_least_squares,
    write_matrix,
    write_vector,
)


class TestValidation:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            as_matrix(np.zeros((0, 3)))
        with pytest.raises(ValueError):
            as_vector([])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            as_matrix([[1.0, np.nan]])
        with pytest.raises(ValueError):
            as_vector([np.inf])

    def test_rejects_wrong_ndim(self):
        with pytest.raises(ValueError):
            as_matrix([1.0, 2.0])
        with pytest.raises(ValueError):
            as_vector([[1.0]])


class TestRank:
    def test_identity(self):
        assert rank(np.eye(3), 1e-10) == 3

    def test_all_ones(self):
        assert rank(np.ones((2, 2)), 1e-10) == 1

    def test_dependent_row(self):
        M = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 2.0]])
        assert rank(M, 1e-10) == 2

    def test_negative_tol_rejected(self):
        with pytest.raises(ValueError):
            rank(np.eye(2), -1.0)

    @pytest.mark.parametrize("seed", range(8))
    def test_rank_equals_rank_of_transpose(self, seed):
        rng = np.random.default_rng(seed)
        r = int(rng.integers(1, 5))
        M = rng.normal(size=(6, r)) @ rng.normal(size=(r, 9))
        assert rank(M) == rank(M.T) == r


class TestExtremeEigenvalues:
    def test_identity(self):
        assert extreme_eigenvalues(np.eye(4)) == (1.0, 1.0)

    def test_diagonal(self):
        lo, hi = extreme_eigenvalues(np.diag([1.0, 4.0]))
        assert lo == pytest.approx(1.0) and hi == pytest.approx(4.0)

    def test_two_by_two(self):
        lo, hi = extreme_eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert lo == pytest.approx(1.0, abs=1e-12)
        assert hi == pytest.approx(3.0, abs=1e-12)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            extreme_eigenvalues(np.ones((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            extreme_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_tridiagonal_closed_form_64(self):
        # second-difference matrix: eigenvalues 2 - 2 cos(j*pi/(n+1)) exactly
        n = 64
        T = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
        lo, hi = extreme_eigenvalues(T)
        expect_lo = 2.0 - 2.0 * np.cos(np.pi / (n + 1))
        expect_hi = 2.0 - 2.0 * np.cos(n * np.pi / (n + 1))
        assert lo == pytest.approx(expect_lo, rel=1e-9)
        assert hi == pytest.approx(expect_hi, rel=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_gram_matrices_are_psd(self, seed):
        rng = np.random.default_rng(seed)
        G = rng.normal(size=(7, 4))
        lo, _ = extreme_eigenvalues(G.T @ G)
        assert lo >= -1e-9


class TestLeastSquares:
    def test_identity(self):
        b = np.array([1.0, 2.0, 3.0])
        assert np.allclose(solve_least_squares(np.eye(3), b), b)

    def test_mean(self):
        u = solve_least_squares(np.array([[1.0], [1.0]]), np.array([0.0, 2.0]))
        assert u == pytest.approx([1.0])

    def test_projection(self):
        M = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        u = solve_least_squares(M, np.array([1.0, 2.0, 5.0]))
        assert np.allclose(u, [1.0, 2.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            solve_least_squares(np.eye(3), np.array([1.0, 2.0]))

    @pytest.mark.parametrize("seed", range(8))
    def test_residual_orthogonal_to_column_space(self, seed):
        rng = np.random.default_rng(seed)
        M = rng.normal(size=(9, 5))
        b = rng.normal(size=9)
        u = solve_least_squares(M, b)
        lhs = np.abs(M.T @ (M @ u - b)).max()
        assert lhs <= 1e-8 * np.abs(M.T @ b).max() + 1e-12


class TestGaussianMatrix:
    def test_deterministic(self):
        a = gaussian_matrix(2, 3, 7)
        b = gaussian_matrix(2, 3, 7)
        assert a.tobytes() == b.tobytes()

    @pytest.mark.parametrize("seed", [0, 11, 202])
    def test_sample_mean(self, seed):
        A = gaussian_matrix(64, 128, seed)
        sigma = np.sqrt(1.0 / 64)
        assert abs(A.mean()) <= 3 * sigma / np.sqrt(64 * 128)

    @pytest.mark.parametrize("seed", [0, 11, 202])
    def test_sample_variance(self, seed):
        A = gaussian_matrix(64, 128, seed)
        assert A.var() == pytest.approx(1.0 / 64, rel=0.1)

    def test_size_validation(self):
        with pytest.raises(ValueError):
            gaussian_matrix(0, 3, 1)

    def test_seed_validation(self):
        with pytest.raises(ValueError):
            gaussian_matrix(2, 2, -1)
        with pytest.raises(ValueError):
            gaussian_matrix(2, 2, 2**64)


class TestRandomSparseSignal:
    def test_nonzero_count(self):
        x = random_sparse_signal(10, 3, 1)
        assert np.count_nonzero(x) == 3

    def test_full_density(self):
        x = random_sparse_signal(5, 5, 2)
        assert np.count_nonzero(x) == 5

    def test_deterministic(self):
        assert random_sparse_signal(10, 3, 1).tobytes() == random_sparse_signal(10, 3, 1).tobytes()

    def test_magnitude_floor(self):
        for seed in range(20):
            x = random_sparse_signal(30, 10, seed)
            nz = x[x != 0]
            assert np.abs(nz).min() >= 1e-6

    def test_invalid_k(self):
        with pytest.raises(ValueError):
            random_sparse_signal(5, 0, 1)
        with pytest.raises(ValueError):
            random_sparse_signal(5, 6, 1)


class TestCsvIO:
    def test_matrix_roundtrip(self, tmp_path):
        A = np.array([[1.25, -3.5, 0.1], [4.0, 5.0, -6.75]])
        path = tmp_path / "m.csv"
        write_matrix(path, A)
        assert np.array_equal(read_matrix(path), A)

    def test_vector_roundtrip(self, tmp_path):
        v = np.array([1.5, -2.0, 3.25])
        path = tmp_path / "v.csv"
        write_vector(path, v)
        assert np.array_equal(read_vector(path), v)

    def test_vector_one_per_line(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("1.5\n-2.0\n3.25\n")
        assert np.array_equal(read_vector(path), [1.5, -2.0, 3.25])

    def test_ragged_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(ValueError):
            read_matrix(path)
