"""Sparse and dense linear-algebra kernels"""

from .sparse import (
    SparseMatrix,
    csr_from_triplets,
    spmv,
    transpose,
    kron,
    tridiag,
    identity,
    diag,
    add,
    scale,
    multiply,
    block_matrix,
    is_symmetric,
    bandwidth,
)
from .dense import (
    CholeskyFactor,
    BandCholeskyFactor,
    DiagonalFactor,
    dense_cholesky,
    cholesky_solve,
    band_cholesky,
    spd_factor,
    jacobi_eigen_sym,
    row_echelon,
    matrix_rank,
    null_space,
)

__all__ = [
    'SparseMatrix',
    'csr_from_triplets',
    'spmv',
    'transpose',
    'kron',
    'tridiag',
    'identity',
    'diag',
    'add',
    'scale',
    'multiply',
    'block_matrix',
    'is_symmetric',
    'bandwidth',
    'CholeskyFactor',
    'BandCholeskyFactor',
    'DiagonalFactor',
    'dense_cholesky',
    'cholesky_solve',
    'band_cholesky',
    'spd_factor',
    'jacobi_eigen_sym',
    'row_echelon',
    'matrix_rank',
    'null_space',
]
