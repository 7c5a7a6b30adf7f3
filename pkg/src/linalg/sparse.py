"""
Compressed sparse row storage and kernels

Provides:
- SparseMatrix: immutable canonical CSR matrix
- Builders: csr_from_triplets, tridiag, identity, diag, block_matrix
- Kernels: spmv, transpose, kron, add, scale

Kernels delegate to scipy.sparse; SparseMatrix keeps the canonical arrays and
checks the CSR invariants on construction.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.errors import DimensionMismatchError, DomainError, NonFiniteError, StructuralError


Triplet = Tuple[int, int, float]


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """
    Canonical CSR matrix.

    Invariants (checked in __post_init__):
    - row_ptr has nrows + 1 non-decreasing entries, row_ptr[0] == 0 and
      row_ptr[-1] == len(values) == len(col_idx)
    - column indices strictly increase within each row and are < ncols
    """

    nrows: int
    ncols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        row_ptr = np.ascontiguousarray(self.row_ptr, dtype=np.int64)
        col_idx = np.ascontiguousarray(self.col_idx, dtype=np.int64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)

        if self.nrows < 0 or self.ncols < 0:
            raise DomainError("shape", (self.nrows, self.ncols), "non-negative dimensions")
        if row_ptr.shape != (self.nrows + 1,):
            raise DimensionMismatchError("SparseMatrix.row_ptr", self.nrows + 1, row_ptr.shape[0])
        if row_ptr[0] != 0 or np.any(np.diff(row_ptr) < 0):
            raise StructuralError(0, -1, self.nrows, self.ncols)
        if not (row_ptr[-1] == len(values) == len(col_idx)):
            raise DimensionMismatchError("SparseMatrix.values", int(row_ptr[-1]), len(values))
        if len(col_idx):
            if col_idx.min() < 0 or col_idx.max() >= self.ncols:
                bad = int(np.argmax((col_idx < 0) | (col_idx >= self.ncols)))
                row = int(np.searchsorted(row_ptr, bad, side="right") - 1)
                raise StructuralError(row, int(col_idx[bad]), self.nrows, self.ncols)
            # strictly increasing columns inside a row: every step that stays in
            # the same row must increase
            same_row = np.ones(len(col_idx) - 1, dtype=bool)
            starts = row_ptr[1:-1]
            starts = starts[(starts > 0) & (starts < len(col_idx))]
            same_row[starts - 1] = False
            if np.any(np.diff(col_idx)[same_row] <= 0):
                raise StructuralError(-1, -1, self.nrows, self.ncols)

        for name, array in (("row_ptr", row_ptr), ("col_idx", col_idx), ("values", values)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    # ------------------------------------------------------------------
    # Conversions
    # ------------------------------------------------------------------

    @classmethod
    def from_scipy(cls, matrix) -> "SparseMatrix":
        """Canonicalize any scipy sparse matrix/array (duplicates summed, zeros kept)."""
        csr = sp.csr_array(matrix, dtype=np.float64, copy=True)
        csr.sum_duplicates()
        csr.sort_indices()
        return cls(
            nrows=csr.shape[0],
            ncols=csr.shape[1],
            row_ptr=csr.indptr,
            col_idx=csr.indices,
            values=csr.data,
        )

    @cached_property
    def _csr(self) -> sp.csr_array:
        return sp.csr_array(
            (self.values, self.col_idx, self.row_ptr),
            shape=(self.nrows, self.ncols),
        )

    def to_scipy(self) -> sp.csr_array:
        """Read-only scipy view; callers must not mutate it."""
        return self._csr

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return len(self.values)

    @property
    def T(self) -> "SparseMatrix":
        return transpose(self)

    def __matmul__(self, x):
        if isinstance(x, SparseMatrix):
            return multiply(self, x)
        return spmv(self, x)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


# ============================================================================
# Builders
# ============================================================================

def csr_from_triplets(triplets: Iterable[Triplet], nrows: int, ncols: int) -> SparseMatrix:
    """
    Build a canonical CSR matrix from (row, col, value) triplets.

    Duplicate positions are summed; entries summing to zero are kept.

    Raises:
        StructuralError: if any index is outside the shape
    """
    entries = list(triplets)
    if entries:
        rows = np.fromiter((t[0] for t in entries), dtype=np.int64, count=len(entries))
        cols = np.fromiter((t[1] for t in entries), dtype=np.int64, count=len(entries))
        vals = np.fromiter((t[2] for t in entries), dtype=np.float64, count=len(entries))
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)

    outside = (rows < 0) | (rows >= nrows) | (cols < 0) | (cols >= ncols)
    if np.any(outside):
        k = int(np.argmax(outside))
        raise StructuralError(int(rows[k]), int(cols[k]), nrows, ncols)

    coo = sp.coo_array((vals, (rows, cols)), shape=(nrows, ncols))
    return SparseMatrix.from_scipy(coo.tocsr())


def tridiag(n: int, sub: float, diag: float, sup: float, scale: float = 1.0) -> SparseMatrix:
    """n x n Toeplitz tridiagonal matrix scale * tridiag(sub, diag, sup)."""
    if n < 1:
        raise DomainError("n", n, "n >= 1")

    triplets = [(i, i, scale * diag) for i in range(n)]
    if sub != 0.0:
        triplets += [(i + 1, i, scale * sub) for i in range(n - 1)]
    if sup != 0.0:
        triplets += [(i, i + 1, scale * sup) for i in range(n - 1)]
    return csr_from_triplets(triplets, n, n)


def identity(n: int) -> SparseMatrix:
    return SparseMatrix.from_scipy(sp.identity(n, format="csr"))


def diag(values: Sequence[float]) -> SparseMatrix:
    values = np.asarray(values, dtype=np.float64)
    return SparseMatrix.from_scipy(sp.diags_array(values, offsets=0, format="csr"))


def block_matrix(blocks: Sequence[Sequence[Optional[SparseMatrix]]]) -> SparseMatrix:
    """Assemble a block matrix; None stands for a zero block whose shape is inferred."""
    grid = [[None if b is None else b.to_scipy() for b in row] for row in blocks]
    return SparseMatrix.from_scipy(sp.block_array(grid, format="csr"))


# ============================================================================
# Kernels
# ============================================================================

def spmv(M: SparseMatrix, x) -> np.ndarray:
    """
    Sparse matrix-vector product M @ x.

    Rows are accumulated in ascending column order, so results are
    reproducible run to run.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != M.ncols:
        raise DimensionMismatchError("spmv", M.ncols, x.shape)
    y = M.to_scipy() @ x
    if not np.all(np.isfinite(y)):
        raise NonFiniteError("spmv")
    return y


def transpose(M: SparseMatrix) -> SparseMatrix:
    return SparseMatrix.from_scipy(M.to_scipy().T.tocsr())


def kron(Ma: SparseMatrix, Mb: SparseMatrix) -> SparseMatrix:
    """Kronecker product; entry [i*rb + k, j*cb + l] = Ma[i, j] * Mb[k, l]."""
    return SparseMatrix.from_scipy(sp.kron(Ma.to_scipy(), Mb.to_scipy(), format="csr"))


def add(Ma: SparseMatrix, Mb: SparseMatrix) -> SparseMatrix:
    if Ma.shape != Mb.shape:
        raise DimensionMismatchError("add", Ma.shape, Mb.shape)
    return SparseMatrix.from_scipy(Ma.to_scipy() + Mb.to_scipy())


def scale(M: SparseMatrix, factor: float) -> SparseMatrix:
    return SparseMatrix.from_scipy(M.to_scipy() * float(factor))


def multiply(Ma: SparseMatrix, Mb: SparseMatrix) -> SparseMatrix:
    """Sparse matrix product Ma @ Mb."""
    if Ma.ncols != Mb.nrows:
        raise DimensionMismatchError("multiply", Ma.ncols, Mb.nrows)
    return SparseMatrix.from_scipy(Ma.to_scipy() @ Mb.to_scipy())


def is_symmetric(M: SparseMatrix, rel_tol: float = 0.0) -> bool:
    """Entrywise symmetry check; rel_tol = 0 demands exact equality."""
    if M.nrows != M.ncols:
        return False
    diff = abs(M.to_scipy() - M.to_scipy().T)
    largest = diff.max() if diff.nnz else 0.0
    scale_ = abs(M.to_scipy()).max() if M.nnz else 0.0
    return largest <= rel_tol * scale_


def bandwidth(M: SparseMatrix) -> int:
    """Largest |i - j| over stored entries."""
    if M.nnz == 0:
        return 0
    rows = np.repeat(np.arange(M.nrows), np.diff(M.row_ptr))
    return int(np.max(np.abs(rows - M.col_idx)))
