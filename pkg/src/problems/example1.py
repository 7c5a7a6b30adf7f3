"""
Example 1 test problem and saddle-point assembly

Provides:
- ProblemBlocks: A, B, C (and the 1-D building blocks T, F, E)
- build_example1(p, nu)
- SaddleSystem and assemble_saddle(blocks, variant)
- manufactured_rhs(system, w_star)

Block structure (h = 1/(p+1)):
    T = (nu/h^2) tridiag(-1, 2, -1)      p x p
    F = (1/h) tridiag(0, 1, -1)          p x p
    E = diag(1, p+1, ..., p^2-p+1)        p x p
    A = blockdiag(I(x)T + T(x)I, I(x)T + T(x)I)     n = 2p^2
    B = [I(x)F, F(x)I]                   m = p^2
    C = E(x)F                            l = p^2
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.errors import DimensionMismatchError, DomainError
from src.linalg.sparse import (
    SparseMatrix,
    add,
    block_matrix,
    diag,
    identity,
    kron,
    scale,
    spmv,
    transpose,
    tridiag,
)


class Variant(str, Enum):
    """Sign pattern of the assembled operator"""
    MINUS = "minus"  # [A B^T 0; -B 0 -C^T; 0 C 0], nonsymmetric
    PLUS = "plus"    # [A B^T 0;  B 0  C^T; 0 C 0], symmetric


@dataclass(frozen=True, eq=False)
class ProblemBlocks:
    """Blocks A (n x n), B (m x n), C (l x m) of a double saddle-point system."""

    A: SparseMatrix
    B: SparseMatrix
    C: SparseMatrix
    p: Optional[int] = None
    nu: Optional[float] = None
    T: Optional[SparseMatrix] = None
    F: Optional[SparseMatrix] = None
    E: Optional[SparseMatrix] = None

    def __post_init__(self):
        if self.A.nrows != self.A.ncols:
            raise DimensionMismatchError("ProblemBlocks.A", "square", self.A.shape)
        if self.B.ncols != self.A.nrows:
            raise DimensionMismatchError("ProblemBlocks.B", self.A.nrows, self.B.ncols)
        if self.C.ncols != self.B.nrows:
            raise DimensionMismatchError("ProblemBlocks.C", self.B.nrows, self.C.ncols)

    @property
    def n(self) -> int:
        return self.A.nrows

    @property
    def m(self) -> int:
        return self.B.nrows

    @property
    def l(self) -> int:
        return self.C.nrows

    @property
    def N(self) -> int:
        return self.n + self.m + self.l

    def label(self) -> str:
        if self.p is None:
            return f"blocks(n={self.n}, m={self.m}, l={self.l})"
        return f"example1(p={self.p}, nu={self.nu})"


def build_example1(p: int, nu: float = 1.0) -> ProblemBlocks:
    """
    Build the Example 1 blocks.

    Args:
        p: grid parameter, p >= 2
        nu: viscosity, nu > 0

    Returns:
        ProblemBlocks with n = 2p^2, m = l = p^2
    """
    if int(p) != p or p < 2:
        raise DomainError("p", p, "integer p >= 2")
    if not nu > 0:
        raise DomainError("nu", nu, "nu > 0")
    p = int(p)

    h = 1.0 / (p + 1)
    T = tridiag(p, -1.0, 2.0, -1.0, nu / h**2)
    F = tridiag(p, 0.0, 1.0, -1.0, 1.0 / h)
    E = diag([1.0 + k * p for k in range(p)])
    I = identity(p)

    laplacian = add(kron(I, T), kron(T, I))
    A = block_matrix([[laplacian, None], [None, laplacian]])
    B = block_matrix([[kron(I, F), kron(F, I)]])
    C = kron(E, F)

    return ProblemBlocks(A=A, B=B, C=C, p=p, nu=float(nu), T=T, F=F, E=E)


@dataclass(frozen=True, eq=False)
class SaddleSystem:
    """Assembled N x N operator of one variant."""

    matrix: SparseMatrix
    variant: Variant
    n: int
    m: int
    l: int
    blocks: Optional[ProblemBlocks] = None

    @property
    def N(self) -> int:
        return self.n + self.m + self.l

    def split(self, w) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.N,):
            raise DimensionMismatchError("SaddleSystem.split", self.N, w.shape)
        return w[: self.n], w[self.n: self.n + self.m], w[self.n + self.m:]

    @staticmethod
    def join(x, y, z) -> np.ndarray:
        return np.concatenate([np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)])

    def apply(self, w) -> np.ndarray:
        return spmv(self.matrix, w)


def assemble_saddle(blocks: ProblemBlocks, variant: Variant = Variant.MINUS) -> SaddleSystem:
    """
    Assemble [A B^T 0; s*B 0 s*C^T; 0 C 0] with s = -1 (minus) or +1 (plus).
    """
    variant = Variant(variant)
    sign = -1.0 if variant is Variant.MINUS else 1.0

    Bt = transpose(blocks.B)
    Ct = transpose(blocks.C)
    matrix = block_matrix([
        [blocks.A, Bt, None],
        [scale(blocks.B, sign), None, scale(Ct, sign)],
        [None, blocks.C, None],
    ])
    return SaddleSystem(
        matrix=matrix,
        variant=variant,
        n=blocks.n,
        m=blocks.m,
        l=blocks.l,
        blocks=blocks,
    )


def manufactured_rhs(system: SaddleSystem, w_star=None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Manufacture b = A w* for a known exact solution.

    Args:
        system: assembled operator
        w_star: exact solution (default: all ones)

    Returns:
        (b, w_star)
    """
    if w_star is None:
        w_star = np.ones(system.N)
    w_star = np.asarray(w_star, dtype=np.float64)
    if w_star.shape != (system.N,):
        raise DimensionMismatchError("manufactured_rhs", system.N, w_star.shape)
    return spmv(system.matrix, w_star), w_star


def random_solution(N: int, seed: int) -> np.ndarray:
    """Seeded random exact solution with entries uniform in [-1, 1]."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, size=N)
