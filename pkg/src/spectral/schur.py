"""
Dense Schur complement chain for small grids

    S   = B A^{-1} B^T        (m x m)
    S_C = C S^{-1} C^T        (l x l)

plus the eigen-decomposition of S_C. Everything here is dense and guarded
by a grid-size limit.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import DenseGuardError, NotPositiveDefiniteError, SchurAsymmetryError
from src.infrastructure.logging import get_logger
from src.linalg.dense import (
    CholeskyFactor,
    cholesky_solve,
    dense_cholesky,
    jacobi_eigen_sym,
    relative_asymmetry,
)
from src.problems.example1 import ProblemBlocks


SPECTRAL_MAX_P = 8
SCHUR_SYMMETRY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SchurChain:
    """S, S_C and the eigenpairs of S_C (eta ascending, vectors as columns)."""

    S: np.ndarray
    S_C: np.ndarray
    eta: np.ndarray
    eta_vectors: np.ndarray
    asymmetry_S: float
    asymmetry_S_C: float
    A_factor: CholeskyFactor
    S_factor: CholeskyFactor

    @property
    def eta_min(self) -> float:
        return float(self.eta[0])

    @property
    def eta_max(self) -> float:
        return float(self.eta[-1])


def _check_size(blocks: ProblemBlocks, max_p: int):
    if blocks.p is not None:
        if blocks.p > max_p:
            raise DenseGuardError(blocks.p, max_p, what="p")
    elif blocks.n > 2 * max_p * max_p:
        raise DenseGuardError(blocks.n, 2 * max_p * max_p, what="n")


def _symmetrized(M: np.ndarray, name: str) -> tuple:
    asym = relative_asymmetry(M)
    if asym >= SCHUR_SYMMETRY_TOL:
        raise SchurAsymmetryError(name, asym, SCHUR_SYMMETRY_TOL)
    return 0.5 * (M + M.T), asym


def compute_schur_chain(blocks: ProblemBlocks, max_p: int = SPECTRAL_MAX_P,
                        A_factor: Optional[CholeskyFactor] = None) -> SchurChain:
    """
    Form S and S_C densely and diagonalize S_C.

    Raises:
        DenseGuardError: grid beyond max_p
        SchurAsymmetryError: S or S_C asymmetric beyond 1e-9 relative
        NotPositiveDefiniteError: A or S not SPD, or a nonpositive eta
    """
    _check_size(blocks, max_p)
    logger = get_logger()

    with logger.performance_log("schur_chain"):
        A_factor = A_factor or dense_cholesky(blocks.A.toarray(), name="A")
        Bd = blocks.B.toarray()
        Cd = blocks.C.toarray()

        S, asym_S = _symmetrized(Bd @ cholesky_solve(A_factor, Bd.T), "S")
        S_factor = dense_cholesky(S, name="S")
        S_C, asym_SC = _symmetrized(Cd @ cholesky_solve(S_factor, Cd.T), "S_C")

        eta, vectors = jacobi_eigen_sym(S_C)

    if eta[0] <= 0.0:
        raise NotPositiveDefiniteError(0, "S_C")

    logger.debug(
        "schur chain computed",
        m=S.shape[0], l=S_C.shape[0],
        eta_min=float(eta[0]), eta_max=float(eta[-1]),
    )
    return SchurChain(
        S=S,
        S_C=S_C,
        eta=eta,
        eta_vectors=vectors,
        asymmetry_S=asym_S,
        asymmetry_S_C=asym_SC,
        A_factor=A_factor,
        S_factor=S_factor,
    )
