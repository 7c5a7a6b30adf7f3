"""Schur complement chain, eta relation roots and spectral verification"""

from .schur import SchurChain, compute_schur_chain, SPECTRAL_MAX_P
from .roots import (
    QuadraticForm,
    QuadraticRoots,
    LambdaRoots,
    PrintedInterval,
    LimitSweep,
    eta_of_lambda,
    lambda_roots,
    printed_root_formula,
    printed_bound_interval,
    limit_sweep,
)
from .spectrum import (
    EigenClass,
    Eigenpair,
    SpectrumReport,
    RESIDUAL_TOL,
    dense_pr_exact,
    enumerate_and_verify_spectrum,
)
from .csv_io import SpectrumRow, dump_spectrum_csv, write_spectrum_csv, parse_spectrum_csv

__all__ = [
    'SchurChain',
    'compute_schur_chain',
    'SPECTRAL_MAX_P',
    'QuadraticForm',
    'QuadraticRoots',
    'LambdaRoots',
    'PrintedInterval',
    'LimitSweep',
    'eta_of_lambda',
    'lambda_roots',
    'printed_root_formula',
    'printed_bound_interval',
    'limit_sweep',
    'EigenClass',
    'Eigenpair',
    'SpectrumReport',
    'RESIDUAL_TOL',
    'dense_pr_exact',
    'enumerate_and_verify_spectrum',
    'SpectrumRow',
    'dump_spectrum_csv',
    'write_spectrum_csv',
    'parse_spectrum_csv',
]
