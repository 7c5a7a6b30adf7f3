"""
Operator plumbing for the Krylov solvers

Operators are scipy.sparse.linalg.LinearOperator instances; SparseMatrix,
scipy sparse matrices/arrays and dense arrays are wrapped on the way in.
Preconditioners may also be plain callables r -> z, or None (identity).
"""

from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from src.errors import DimensionMismatchError
from src.linalg.sparse import SparseMatrix


VectorMap = Callable[[np.ndarray], np.ndarray]
OperatorLike = Union[LinearOperator, SparseMatrix, np.ndarray, VectorMap, Any]


def _is_matrix(op) -> bool:
    return isinstance(op, (LinearOperator, SparseMatrix, np.ndarray)) or sp.issparse(op)


def make_operator(dimension: int, apply: VectorMap, name: str = "operator") -> LinearOperator:
    """Wrap a matrix-free map v -> Op(v) as a square LinearOperator."""

    def matvec(v):
        return np.asarray(apply(np.ravel(v)), dtype=np.float64)

    op = LinearOperator(shape=(dimension, dimension), matvec=matvec, dtype=np.float64)
    op.name = name
    return op


def as_operator(op: OperatorLike, dimension: Optional[int] = None) -> LinearOperator:
    """Coerce a SparseMatrix, scipy sparse, dense array, callable or LinearOperator to a LinearOperator."""
    if isinstance(op, LinearOperator):
        return op
    if isinstance(op, SparseMatrix):
        return aslinearoperator(op.to_scipy())
    if isinstance(op, np.ndarray) or sp.issparse(op):
        return aslinearoperator(op)
    if callable(op):
        if dimension is None:
            raise DimensionMismatchError("as_operator", "dimension for a callable", None)
        return make_operator(dimension, op)
    raise TypeError(f"cannot use {type(op).__name__} as an operator")


def as_apply(precond: Optional[OperatorLike], dimension: int) -> VectorMap:
    """Preconditioner application as a plain function; None means identity."""
    if precond is None:
        return lambda r: np.array(r, dtype=np.float64, copy=True)
    if _is_matrix(precond):
        op = as_operator(precond)
        if op.shape != (dimension, dimension):
            raise DimensionMismatchError("preconditioner", (dimension, dimension), op.shape)
        return op.matvec
    if callable(precond):
        return precond
    raise TypeError(f"cannot use {type(precond).__name__} as a preconditioner")


@dataclass
class InnerTally:
    """
    Inner-iteration accounting for one outer solve.

    Owned by the caller of the outer solver and passed to each preconditioner
    application; preconditioner states stay immutable.
    """

    applications: int = 0
    pcg_solves: int = 0
    pcg_iterations: int = 0
    aux_iterations: int = 0
    per_solve: List[int] = field(default_factory=list)

    def record_application(self):
        self.applications += 1

    def record_pcg(self, iterations: int):
        self.pcg_solves += 1
        self.pcg_iterations += iterations
        self.per_solve.append(iterations)

    def record_aux(self, iterations: int):
        self.aux_iterations += iterations

    @property
    def average_pcg(self) -> float:
        if self.pcg_solves == 0:
            return 0.0
        return self.pcg_iterations / self.pcg_solves

    @property
    def total(self) -> int:
        return self.pcg_iterations + self.aux_iterations
