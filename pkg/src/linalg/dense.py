"""
Dense kernels for desk-scale exact solves

Provides:
- dense_cholesky / cholesky_solve (LAPACK potrf via scipy)
- band_cholesky for large banded SPD matrices
- spd_factor: picks diagonal, dense or band factorization
- jacobi_eigen_sym: cyclic Jacobi eigensolver for symmetric matrices
- row_echelon / matrix_rank / null_space by partial-pivot elimination
"""

import re
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from src.errors import (
    DimensionMismatchError,
    EigenConvergenceError,
    NotPositiveDefiniteError,
    NotSymmetricError,
)
from src.linalg.sparse import SparseMatrix, bandwidth


SYMMETRY_TOL = 1e-12
DENSE_LIMIT = 5000


def _as_square(M, operation: str) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(operation, "square matrix", M.shape)
    return M


def relative_asymmetry(M: np.ndarray) -> float:
    norm = np.linalg.norm(M)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(M - M.T) / norm)


def _require_symmetric(M: np.ndarray, tol: float):
    asym = relative_asymmetry(M)
    if asym > tol:
        raise NotSymmetricError(asym, tol)


def _check_rhs(n: int, b, operation: str) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != n:
        raise DimensionMismatchError(operation, n, b.shape)
    return b


# ============================================================================
# Cholesky factors
# ============================================================================

@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    """Dense lower-triangular Cholesky factor, M = L @ L.T."""

    lower: np.ndarray

    @property
    def size(self) -> int:
        return self.lower.shape[0]

    def solve(self, b) -> np.ndarray:
        return cholesky_solve(self, b)

    def logdet(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self.lower))))


@dataclass(frozen=True, eq=False)
class BandCholeskyFactor:
    """Lower band Cholesky factor in LAPACK banded storage."""

    banded: np.ndarray
    bandwidth: int

    @property
    def size(self) -> int:
        return self.banded.shape[1]

    def solve(self, b) -> np.ndarray:
        b = _check_rhs(self.size, b, "band_cholesky_solve")
        return sla.cho_solve_banded((self.banded, True), b)


@dataclass(frozen=True, eq=False)
class DiagonalFactor:
    """Factor of a positive diagonal matrix."""

    diagonal: np.ndarray

    @property
    def size(self) -> int:
        return self.diagonal.shape[0]

    def solve(self, b) -> np.ndarray:
        b = _check_rhs(self.size, b, "diagonal_solve")
        if b.ndim == 1:
            return b / self.diagonal
        return b / self.diagonal[:, None]


SpdFactor = Union[CholeskyFactor, BandCholeskyFactor, DiagonalFactor]


def dense_cholesky(M, sym_tol: float = SYMMETRY_TOL, name: str = "matrix") -> CholeskyFactor:
    """
    Cholesky factorization of a dense SPD matrix.

    Args:
        M: symmetric matrix (relative asymmetry at most sym_tol)
        name: label used in the error message

    Raises:
        NotSymmetricError: input is not symmetric
        NotPositiveDefiniteError: a pivot is not positive; carries the 0-based pivot index
    """
    M = _as_square(M, "dense_cholesky")
    _require_symmetric(M, sym_tol)

    factor, info = lapack.dpotrf(M, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefiniteError(pivot=info - 1, matrix=name)
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    return CholeskyFactor(lower=np.tril(factor))


def cholesky_solve(factor: CholeskyFactor, b) -> np.ndarray:
    """Solve (L L^T) x = b; b may be a vector or a matrix of right-hand sides."""
    b = _check_rhs(factor.size, b, "cholesky_solve")
    return sla.cho_solve((factor.lower, True), b)


def band_cholesky(M: SparseMatrix, name: str = "matrix") -> BandCholeskyFactor:
    """Band Cholesky of a symmetric sparse matrix with bandwidth detected from its pattern."""
    if M.nrows != M.ncols:
        raise DimensionMismatchError("band_cholesky", "square matrix", M.shape)
    u = bandwidth(M)
    n = M.nrows

    lower = M.to_scipy().tocoo()
    keep = lower.row >= lower.col
    banded = np.zeros((u + 1, n))
    banded[lower.row[keep] - lower.col[keep], lower.col[keep]] = lower.data[keep]

    try:
        factor = sla.cholesky_banded(banded, lower=True)
    except np.linalg.LinAlgError as exc:
        match = re.search(r"(\d+)", str(exc))
        pivot = int(match.group(1)) - 1 if match else -1
        raise NotPositiveDefiniteError(pivot=pivot, matrix=name) from exc
    return BandCholeskyFactor(banded=factor, bandwidth=u)


def spd_factor(M: SparseMatrix, dense_limit: int = DENSE_LIMIT, name: str = "matrix") -> SpdFactor:
    """
    Exact factorization of a sparse SPD matrix.

    Diagonal matrices get a DiagonalFactor; up to dense_limit rows a dense
    Cholesky is used, above it a band Cholesky.
    """
    if bandwidth(M) == 0:
        d = M.diagonal()
        bad = np.flatnonzero(~(d > 0))
        if bad.size:
            raise NotPositiveDefiniteError(pivot=int(bad[0]), matrix=name)
        return DiagonalFactor(diagonal=d)
    if M.nrows <= dense_limit:
        return dense_cholesky(M.toarray(), name=name)
    return band_cholesky(M, name=name)


# ============================================================================
# Symmetric eigensolver
# ============================================================================

def jacobi_eigen_sym(
    M,
    tol: float = 1e-12,
    max_sweeps: int = 100,
    sym_tol: float = SYMMETRY_TOL,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps rotate every off-diagonal pair (p, q) to zero until the
    off-diagonal Frobenius norm is below tol * ||M||_F.

    Returns:
        (eigenvalues ascending, eigenvectors as columns)
    """
    A = _as_square(M, "jacobi_eigen_sym").copy()
    _require_symmetric(A, sym_tol)
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)

    target = tol * np.linalg.norm(A)
    off = _off_norm(A)
    sweeps = 0
    while off > target:
        if sweeps == max_sweeps:
            raise EigenConvergenceError(max_sweeps, off)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0

                vec_p = V[:, p].copy()
                V[:, p] = c * vec_p - s * V[:, q]
                V[:, q] = s * vec_p + c * V[:, q]
        off = _off_norm(A)

    eigenvalues = np.diag(A).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], V[:, order]


def _off_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


# ============================================================================
# Rank and null space
# ============================================================================

def row_echelon(M, rel_tol: float = 1e-10) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form by Gaussian elimination with partial pivoting.

    A pivot is accepted when its magnitude exceeds rel_tol * ||M||_F.

    Returns:
        (R, pivot columns)
    """
    R = np.array(M, dtype=np.float64, copy=True)
    if R.ndim != 2:
        raise DimensionMismatchError("row_echelon", "2-D matrix", R.shape)
    rows, cols = R.shape
    tol = rel_tol * np.linalg.norm(R)
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        i = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[i, c]) <= tol:
            continue
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] /= R[r, c]
        others = np.arange(rows) != r
        R[others] -= np.outer(R[others, c], R[r])
        pivots.append(c)
        r += 1
    return R, pivots


def matrix_rank(M, rel_tol: float = 1e-10) -> int:
    return len(row_echelon(M, rel_tol)[1])


def null_space(M, rel_tol: float = 1e-10) -> np.ndarray:
    """Basis of the right null space as columns (not orthonormalized)."""
    R, pivots = row_echelon(M, rel_tol)
    cols = R.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)))
    for k, f in enumerate(free):
        basis[f, k] = 1.0
        for row, pc in enumerate(pivots):
            basis[pc, k] = -R[row, f]
    return basis
