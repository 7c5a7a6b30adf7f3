"""
Tests for the CSR sparse core

Covers:
- triplet assembly (duplicates, bounds, explicit zeros)
- spmv, transpose, kron, add, scale, multiply
- tridiag and block builders
- canonical-form validation
- adjoint and mixed-product properties (hypothesis)
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import DimensionMismatchError, DomainError, StructuralError
from src.linalg.sparse import (
    SparseMatrix,
    add,
    bandwidth,
    block_matrix,
    csr_from_triplets,
    diag,
    identity,
    is_symmetric,
    kron,
    multiply,
    scale,
    spmv,
    transpose,
    tridiag,
)


def random_sparse(seed: int, nrows: int, ncols: int, density: float = 0.4) -> SparseMatrix:
    rng = np.random.default_rng(seed)
    dense = rng.standard_normal((nrows, ncols))
    dense[rng.random((nrows, ncols)) > density] = 0.0
    triplets = [(i, j, dense[i, j]) for i, j in zip(*np.nonzero(dense))]
    return csr_from_triplets(triplets, nrows, ncols)


# ============================================================================
# Triplet assembly
# ============================================================================

class TestCsrFromTriplets:
    def test_identity(self):
        M = csr_from_triplets([(0, 0, 1.0), (1, 1, 1.0)], 2, 2)
        np.testing.assert_array_equal(M.toarray(), np.eye(2))

    def test_duplicates_are_summed(self):
        M = csr_from_triplets([(0, 1, 2.0), (0, 1, 3.0)], 1, 2)
        np.testing.assert_array_equal(M.toarray(), [[0.0, 5.0]])
        assert M.nnz == 1

    def test_out_of_range_row(self):
        with pytest.raises(StructuralError) as exc_info:
            csr_from_triplets([(2, 0, 1.0)], 2, 2)
        assert exc_info.value.code == "SPARSE_001"

    def test_negative_column(self):
        with pytest.raises(StructuralError):
            csr_from_triplets([(0, -1, 1.0)], 2, 2)

    def test_cancelling_entries_stay_stored(self):
        M = csr_from_triplets([(0, 0, 1.0), (0, 0, -1.0)], 1, 1)
        assert M.nnz == 1
        assert M.values[0] == 0.0

    def test_empty(self):
        M = csr_from_triplets([], 3, 2)
        assert M.shape == (3, 2)
        assert M.nnz == 0
        np.testing.assert_array_equal(M.row_ptr, [0, 0, 0, 0])

    def test_columns_sorted_within_rows(self):
        M = csr_from_triplets([(0, 2, 1.0), (0, 0, 2.0), (1, 1, 3.0)], 2, 3)
        np.testing.assert_array_equal(M.col_idx, [0, 2, 1])
        np.testing.assert_array_equal(M.row_ptr, [0, 2, 3])


class TestCanonicalForm:
    def test_unsorted_columns_rejected(self):
        with pytest.raises(StructuralError):
            SparseMatrix(nrows=1, ncols=3, row_ptr=[0, 2], col_idx=[2, 0], values=[1.0, 2.0])

    def test_duplicate_columns_rejected(self):
        with pytest.raises(StructuralError):
            SparseMatrix(nrows=1, ncols=3, row_ptr=[0, 2], col_idx=[1, 1], values=[1.0, 2.0])

    def test_row_ptr_length(self):
        with pytest.raises(DimensionMismatchError):
            SparseMatrix(nrows=2, ncols=2, row_ptr=[0, 1], col_idx=[0], values=[1.0])

    def test_arrays_read_only(self):
        M = identity(2)
        with pytest.raises(ValueError):
            M.values[0] = 5.0

    def test_unsorted_in_second_row_rejected(self):
        with pytest.raises(StructuralError):
            SparseMatrix(nrows=2, ncols=3, row_ptr=[0, 1, 3], col_idx=[2, 2, 0], values=[1.0, 1.0, 1.0])


# ============================================================================
# Kernels
# ============================================================================

class TestSpmv:
    def test_identity(self):
        np.testing.assert_array_equal(spmv(identity(2), [3.0, 4.0]), [3.0, 4.0])

    def test_f_block_p2(self):
        F = tridiag(2, 0.0, 1.0, -1.0, 3.0)
        np.testing.assert_array_equal(spmv(F, [1.0, 1.0]), [0.0, 3.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            spmv(identity(2), [1.0, 2.0, 3.0])

    def test_matmul_operator(self):
        M = tridiag(3, -1.0, 2.0, -1.0)
        x = np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(M @ x, M.toarray() @ x)


class TestKron:
    def test_e_kron_f_p2(self):
        E = diag([1.0, 3.0])
        F = tridiag(2, 0.0, 1.0, -1.0, 3.0)
        expected = np.zeros((4, 4))
        expected[:2, :2] = [[3.0, -3.0], [0.0, 3.0]]
        expected[2:, 2:] = [[9.0, -9.0], [0.0, 9.0]]
        np.testing.assert_array_equal(kron(E, F).toarray(), expected)

    def test_identity_kron_identity(self):
        np.testing.assert_array_equal(kron(identity(2), identity(3)).toarray(), np.eye(6))


class TestTridiag:
    def test_laplacian_block_p3(self):
        T = tridiag(3, -1.0, 2.0, -1.0, 16.0)
        np.testing.assert_array_equal(
            T.toarray(), [[32.0, -16.0, 0.0], [-16.0, 32.0, -16.0], [0.0, -16.0, 32.0]]
        )

    def test_upper_bidiagonal_p2(self):
        np.testing.assert_array_equal(
            tridiag(2, 0.0, 1.0, -1.0, 3.0).toarray(), [[3.0, -3.0], [0.0, 3.0]]
        )

    def test_single_row(self):
        np.testing.assert_array_equal(tridiag(1, -1.0, 2.0, -1.0, 5.0).toarray(), [[10.0]])

    def test_zero_size_rejected(self):
        with pytest.raises(DomainError):
            tridiag(0, -1.0, 2.0, -1.0)

    def test_zero_off_diagonal_not_stored(self):
        assert tridiag(4, 0.0, 1.0, -1.0).nnz == 7


class TestBuilders:
    def test_block_matrix_with_zero_blocks(self):
        A = identity(2)
        B = csr_from_triplets([(0, 0, 1.0), (0, 1, 2.0)], 1, 2)
        M = block_matrix([[A, transpose(B)], [B, None]])
        expected = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 2.0], [1.0, 2.0, 0.0]])
        np.testing.assert_array_equal(M.toarray(), expected)

    def test_add_and_scale(self):
        M = add(scale(identity(3), 2.0), tridiag(3, -1.0, 0.0, -1.0))
        np.testing.assert_array_equal(M.toarray(), tridiag(3, -1.0, 2.0, -1.0).toarray())

    def test_add_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            add(identity(2), identity(3))

    def test_multiply(self):
        M = random_sparse(3, 4, 5)
        N = random_sparse(4, 5, 3)
        np.testing.assert_allclose(multiply(M, N).toarray(), M.toarray() @ N.toarray(), atol=1e-14)

    def test_multiply_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            multiply(identity(2), identity(3))

    def test_symmetry_and_bandwidth(self):
        T = tridiag(5, -1.0, 2.0, -1.0)
        assert is_symmetric(T)
        assert bandwidth(T) == 1
        assert not is_symmetric(tridiag(3, 0.0, 1.0, -1.0))
        assert bandwidth(diag([1.0, 2.0])) == 0


# ============================================================================
# Properties
# ============================================================================

class TestAlgebraicProperties:
    @given(
        seed=st.integers(min_value=0, max_value=2**31 - 1),
        nrows=st.integers(min_value=1, max_value=7),
        ncols=st.integers(min_value=1, max_value=7),
    )
    @settings(max_examples=40, deadline=None)
    def test_adjoint_identity(self, seed, nrows, ncols):
        """y . (M x) == (M^T y) . x"""
        M = random_sparse(seed, nrows, ncols)
        rng = np.random.default_rng(seed + 1)
        x = rng.standard_normal(ncols)
        y = rng.standard_normal(nrows)
        lhs = y @ spmv(M, x)
        rhs = spmv(transpose(M), y) @ x
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_kron_mixed_product(self, seed):
        """(A kron B)(C kron D) == (AC) kron (BD)"""
        A = random_sparse(seed, 2, 3)
        C = random_sparse(seed + 1, 3, 2)
        B = random_sparse(seed + 2, 3, 2)
        D = random_sparse(seed + 3, 2, 3)
        lhs = multiply(kron(A, B), kron(C, D)).toarray()
        rhs = kron(multiply(A, C), multiply(B, D)).toarray()
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_transpose_is_involution(self, seed):
        M = random_sparse(seed, 4, 6)
        np.testing.assert_array_equal(transpose(transpose(M)).toarray(), M.toarray())
