"""Incomplete factorization and Krylov solvers"""

from .ict import IctFactor, ict, ict_solve
from .operators import InnerTally, make_operator, as_operator, as_apply
from .krylov import SolveReport, pcg, gmres, fgmres, minres

__all__ = [
    'IctFactor',
    'ict',
    'ict_solve',
    'InnerTally',
    'make_operator',
    'as_operator',
    'as_apply',
    'SolveReport',
    'pcg',
    'gmres',
    'fgmres',
    'minres',
]
