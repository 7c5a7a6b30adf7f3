"""
Tests for the threshold incomplete Cholesky factorization
"""

import numpy as np
import pytest
from scipy.linalg import solve_triangular

from src.errors import DimensionMismatchError, DomainError, IctBreakdownError
from src.linalg.sparse import csr_from_triplets, diag, tridiag
from src.problems.example1 import build_example1
from src.solvers.ict import ict, ict_solve
from src.solvers.krylov import pcg


def dense_to_sparse(M: np.ndarray):
    rows, cols = np.nonzero(M)
    return csr_from_triplets(list(zip(rows, cols, M[rows, cols])), *M.shape)


class TestIctFactor:
    def test_diagonal_is_exact(self):
        factor = ict(diag([4.0, 9.0]), droptol=1e-2)
        np.testing.assert_allclose(factor.L.toarray(), np.diag([2.0, 3.0]))
        assert factor.applied_shift == 0.0

    def test_solve_diagonal(self):
        factor = ict(diag([4.0, 9.0]), droptol=1e-2)
        np.testing.assert_allclose(factor.solve([4.0, 9.0]), [1.0, 1.0])

    def test_tridiagonal_has_no_fill(self):
        T = tridiag(6, -1.0, 2.0, -1.0)
        factor = ict(T, droptol=1e-2)
        L = factor.L.toarray()
        np.testing.assert_allclose(L @ L.T, T.toarray(), atol=1e-13)
        np.testing.assert_array_equal(np.triu(L, 1), 0.0)

    def test_tiny_droptol_is_near_exact(self):
        rng = np.random.default_rng(3)
        G = rng.standard_normal((20, 20))
        M = G @ G.T + 20 * np.eye(20)
        M = 0.5 * (M + M.T)
        factor = ict(dense_to_sparse(M), droptol=1e-12)
        b = rng.standard_normal(20)
        x = factor.solve(b)
        assert np.linalg.norm(M @ x - b) / np.linalg.norm(b) < 1e-10

    def test_larger_droptol_drops_entries(self):
        A = build_example1(6, 1.0).A
        coarse = ict(A, droptol=1e-1)
        fine = ict(A, droptol=1e-4)
        assert coarse.nnz < fine.nnz
        assert coarse.droptol == pytest.approx(1e-1)

    @pytest.mark.parametrize("droptol", [0.0, -1e-3])
    def test_droptol_must_be_positive(self, droptol):
        with pytest.raises(DomainError):
            ict(diag([1.0, 1.0]), droptol=droptol)

    def test_non_square(self):
        with pytest.raises(DimensionMismatchError):
            ict(csr_from_triplets([(0, 0, 1.0)], 1, 2))

    def test_indefinite_breaks_down(self):
        M = dense_to_sparse(np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(IctBreakdownError) as exc_info:
            ict(M)
        assert exc_info.value.code == "FACTOR_003"

    def test_shift_recovers_weakly_indefinite(self):
        # exact pivot 2 is 1 - 1.0001 < 0; a 1e-3 diagonal shift fixes it
        M = dense_to_sparse(np.array([[1.0, 1.00005], [1.00005, 1.0]]))
        factor = ict(M, droptol=1e-2)
        assert factor.applied_shift >= 1e-3
        L = factor.L.toarray()
        assert np.all(np.diag(L) > 0)

    def test_solve_wrong_length(self):
        factor = ict(diag([1.0, 2.0]))
        with pytest.raises(DimensionMismatchError):
            ict_solve(factor, np.ones(3))


class TestIctAsPreconditioner:
    def test_pcg_iterations_drop(self):
        A = build_example1(8, 1.0).A
        b = A.to_scipy() @ np.ones(A.nrows)
        _, plain = pcg(A, b, tol=1e-8, maxit=500)
        factor = ict(A, droptol=1e-2)
        x, preconditioned = pcg(A, b, factor.solve, tol=1e-8, maxit=500)
        assert preconditioned.converged
        assert preconditioned.outer_iters < plain.outer_iters
        assert np.linalg.norm(x - 1.0) / np.sqrt(A.nrows) < 1e-5

    def test_fill_kept_at_fine_grid(self):
        # off-diagonals of A scale like 1/h^2 while L scales like 1/h, so
        # comparing after the pivot division dropped every entry at p = 16
        A = build_example1(16, 1.0).A
        factor = ict(A, droptol=1e-2)
        assert factor.applied_shift == 0.0
        assert factor.nnz > A.nrows

        Ad = A.to_scipy().toarray()
        L = factor.L.toarray()
        half = solve_triangular(L, Ad, lower=True)
        preconditioned = solve_triangular(L, half.T, lower=True)
        before = np.linalg.eigvalsh(Ad)
        after = np.linalg.eigvalsh(0.5 * (preconditioned + preconditioned.T))
        assert after[-1] / after[0] < 0.5 * before[-1] / before[0]

        b = Ad @ np.ones(A.nrows)
        _, plain = pcg(A, b, tol=1e-8, maxit=1000)
        _, with_ict = pcg(A, b, factor.solve, tol=1e-8, maxit=1000)
        assert with_ict.converged
        assert 2 * with_ict.outer_iters <= plain.outer_iters
