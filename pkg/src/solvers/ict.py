"""
Incomplete Cholesky with threshold dropping (ICT)

Left-looking column factorization. Entry L[i, j] (i > j) is dropped when
its updated value before scaling by the pivot, L[i, j] * L[j, j], is below
droptol * ||M[:, j]||_2 in magnitude; diagonals are always kept. A
non-positive pivot restarts the factorization on M + sigma * diag(M) with
sigma = 1e-3, 2e-3, 4e-3, ... up to 1.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import List

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from src.errors import DimensionMismatchError, DomainError, IctBreakdownError
from src.infrastructure.logging import get_logger
from src.linalg.sparse import SparseMatrix


INITIAL_SHIFT = 1e-3
MAX_SHIFT = 1.0


class _PivotBreakdown(Exception):
    def __init__(self, index: int):
        self.index = index


@dataclass(frozen=True, eq=False)
class IctFactor:
    """Lower-triangular incomplete factor with M ~ L @ L.T."""

    L: SparseMatrix
    applied_shift: float
    droptol: float

    @property
    def size(self) -> int:
        return self.L.nrows

    @property
    def nnz(self) -> int:
        return self.L.nnz

    @cached_property
    def _triangular(self):
        # a triangular matrix factors without fill under the natural ordering
        return splu(
            sp.csc_matrix(self.L.to_scipy()),
            permc_spec="NATURAL",
            diag_pivot_thresh=0.0,
        )

    def solve(self, r) -> np.ndarray:
        return ict_solve(self, r)


def ict(M: SparseMatrix, droptol: float = 1e-2) -> IctFactor:
    """
    Threshold incomplete Cholesky of an SPD matrix.

    Args:
        M: symmetric positive definite matrix; only the lower triangle is read
        droptol: relative drop tolerance, > 0

    Raises:
        DomainError: droptol <= 0 or M not square
        IctBreakdownError: breakdown persists for every shift up to 1
    """
    if not droptol > 0:
        raise DomainError("droptol", droptol, "droptol > 0")
    if M.nrows != M.ncols:
        raise DimensionMismatchError("ict", "square matrix", M.shape)

    csr = M.to_scipy()
    lower = sp.csc_array(sp.tril(csr, format="csc"))
    lower.sort_indices()
    col_norms = np.sqrt(np.asarray(abs(csr).power(2).sum(axis=0)).ravel())
    diagonal = M.diagonal()

    logger = get_logger()
    sigma = 0.0
    while True:
        try:
            L = _factor(lower, sigma * diagonal, col_norms, droptol)
            break
        except _PivotBreakdown as exc:
            next_sigma = INITIAL_SHIFT if sigma == 0.0 else 2.0 * sigma
            if next_sigma > MAX_SHIFT:
                raise IctBreakdownError(pivot=exc.index, last_shift=sigma) from None
            logger.warning(
                "ICT breakdown, retrying with diagonal shift",
                pivot=exc.index,
                shift=next_sigma,
            )
            sigma = next_sigma

    logger.debug("ICT factor built", n=M.nrows, nnz=L.nnz, shift=sigma, droptol=droptol)
    return IctFactor(L=L, applied_shift=sigma, droptol=float(droptol))


def _factor(lower: sp.csc_array, shift: np.ndarray, col_norms: np.ndarray, droptol: float) -> SparseMatrix:
    n = lower.shape[0]
    indptr, indices, data = lower.indptr, lower.indices, lower.data

    col_rows: List[np.ndarray] = [None] * n
    col_vals: List[np.ndarray] = [None] * n
    # row_links[i]: columns k < i with a kept entry L[i, k]
    row_links: List[List[int]] = [[] for _ in range(n)]
    # next_pos[k]: position in column k of the next row to be visited
    next_pos = np.ones(n, dtype=np.int64)
    work = np.zeros(n)

    for j in range(n):
        start, end = indptr[j], indptr[j + 1]
        rows_j = indices[start:end]
        work[rows_j] = data[start:end]
        work[j] += shift[j]
        touched = [rows_j, np.array([j])]

        for k in row_links[j]:
            pos = next_pos[k]
            rows_k = col_rows[k]
            vals_k = col_vals[k]
            ljk = vals_k[pos]
            work[rows_k[pos:]] -= vals_k[pos:] * ljk
            touched.append(rows_k[pos:])
            next_pos[k] = pos + 1

        candidates = np.unique(np.concatenate(touched))
        pivot = work[j]
        if not (pivot > 0.0) or not np.isfinite(pivot):
            raise _PivotBreakdown(j)
        ljj = np.sqrt(pivot)

        below = candidates[candidates > j]
        # threshold on the unscaled update, before the pivot division
        keep = np.abs(work[below]) >= droptol * col_norms[j]
        values = work[below] / ljj
        kept_rows = below[keep]
        for i in kept_rows:
            row_links[i].append(j)

        col_rows[j] = np.concatenate(([j], kept_rows))
        col_vals[j] = np.concatenate(([ljj], values[keep]))
        work[candidates] = 0.0

    lengths = np.array([len(r) for r in col_rows], dtype=np.int64)
    col_ptr = np.concatenate(([0], np.cumsum(lengths)))
    factor = sp.csc_array(
        (np.concatenate(col_vals), np.concatenate(col_rows), col_ptr),
        shape=(n, n),
    )
    return SparseMatrix.from_scipy(factor.tocsr())


def ict_solve(factor: IctFactor, r) -> np.ndarray:
    """Apply (L L^T)^{-1} r by a forward then a backward triangular solve."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (factor.size,):
        raise DimensionMismatchError("ict_solve", factor.size, r.shape)
    lu = factor._triangular
    y = lu.solve(r)
    return lu.solve(y, trans="T")
