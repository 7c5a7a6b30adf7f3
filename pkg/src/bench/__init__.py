"""Benchmark cases, runner and result tables"""

from .cases import (
    SolverKind,
    ExactSolution,
    CaseStatus,
    CaseConfig,
    CaseResult,
    TableRow,
    DEFAULT_TOL,
)
from .runner import run_case, run_sweep, table_configs
from .tables import CSV_HEADER, emit_table, parse_table_csv
from .case_file import parse_case_text, load_case_file

__all__ = [
    'SolverKind',
    'ExactSolution',
    'CaseStatus',
    'CaseConfig',
    'CaseResult',
    'TableRow',
    'DEFAULT_TOL',
    'run_case',
    'run_sweep',
    'table_configs',
    'CSV_HEADER',
    'emit_table',
    'parse_table_csv',
    'parse_case_text',
    'load_case_file',
]
