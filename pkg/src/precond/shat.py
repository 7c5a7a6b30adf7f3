"""
Schur complement approximation S_hat

    full:      S_hat = alpha I + (1/alpha) C^T C
    diagonal:  S_hat = alpha I + (1/alpha) diag(C^T C)
    exact:     S_hat = S = B A^{-1} B^T (dense, small grids only)

The factorization is computed once at build time.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import scipy.sparse as sp

from src.errors import DenseGuardError, DimensionMismatchError, DomainError
from src.linalg.dense import (
    DENSE_LIMIT,
    SpdFactor,
    cholesky_solve,
    dense_cholesky,
    spd_factor,
)
from src.linalg.sparse import (
    SparseMatrix,
    add,
    diag,
    identity,
    multiply,
    scale,
    spmv,
    transpose,
)


EXACT_SCHUR_MAX_DIM = 128


class ShatMode(str, Enum):
    FULL = "full"
    DIAGONAL = "diagonal"
    EXACT = "exact"


@dataclass(frozen=True, eq=False)
class ShatOperator:
    """An SPD m x m approximation of the Schur complement with a precomputed factor."""

    mode: ShatMode
    alpha: float
    matrix: SparseMatrix
    factor: SpdFactor

    @property
    def size(self) -> int:
        return self.matrix.nrows

    def solve(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        if r.shape[0] != self.size:
            raise DimensionMismatchError("ShatOperator.solve", self.size, r.shape)
        return self.factor.solve(r)

    def apply(self, v) -> np.ndarray:
        return spmv(self.matrix, v)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    @classmethod
    def from_matrix(
        cls,
        matrix: SparseMatrix,
        alpha: float,
        mode: ShatMode = ShatMode.FULL,
        dense_limit: int = DENSE_LIMIT,
    ) -> "ShatOperator":
        """Wrap an explicitly given SPD matrix."""
        return cls(
            mode=ShatMode(mode),
            alpha=float(alpha),
            matrix=matrix,
            factor=spd_factor(matrix, dense_limit=dense_limit, name="S_hat"),
        )


def build_shat(
    C: SparseMatrix,
    alpha: float,
    mode: ShatMode = ShatMode.FULL,
    dense_limit: int = DENSE_LIMIT,
) -> ShatOperator:
    """
    Build S_hat from C and alpha.

    Args:
        C: l x m block
        alpha: regularization, > 0
        mode: full or diagonal (exact needs the other blocks, see exact_schur_shat)
    """
    if not alpha > 0:
        raise DomainError("alpha", alpha, "alpha > 0")
    mode = ShatMode(mode)
    if mode is ShatMode.EXACT:
        raise DomainError("mode", mode.value, "use exact_schur_shat for the exact Schur complement")

    CtC = multiply(transpose(C), C)
    if mode is ShatMode.FULL:
        matrix = add(scale(identity(C.ncols), alpha), scale(CtC, 1.0 / alpha))
    else:
        matrix = diag(alpha + CtC.diagonal() / alpha)
    return ShatOperator.from_matrix(matrix, alpha, mode, dense_limit)


def exact_schur_shat(
    A: SparseMatrix,
    B: SparseMatrix,
    alpha: float,
    max_dim: int = EXACT_SCHUR_MAX_DIM,
    A_factor: Optional[SpdFactor] = None,
) -> ShatOperator:
    """Dense exact S = B A^{-1} B^T wrapped as an S_hat (for small grids only)."""
    if A.nrows > max_dim:
        raise DenseGuardError(A.nrows, max_dim, what="n")
    A_factor = A_factor or dense_cholesky(A.toarray(), name="A")
    Bd = B.toarray()
    S = Bd @ cholesky_solve(A_factor, Bd.T)
    S = 0.5 * (S + S.T)
    matrix = SparseMatrix.from_scipy(sp.csr_array(S))
    return ShatOperator(
        mode=ShatMode.EXACT,
        alpha=float(alpha),
        matrix=matrix,
        factor=dense_cholesky(S, name="S"),
    )
