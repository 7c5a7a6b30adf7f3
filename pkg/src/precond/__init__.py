"""Block preconditioners and Schur complement approximations"""

from .shat import ShatMode, ShatOperator, build_shat, exact_schur_shat
from .preconditioners import (
    PreconditionerKind,
    InnerSettings,
    PreconditionerState,
    DEFAULT_ALPHA,
    build_preconditioner,
    apply_pr,
    apply_prd,
    apply_pbd,
    apply_pss,
    apply_preconditioner,
    as_operator,
    assemble_preconditioner,
)

__all__ = [
    'ShatMode',
    'ShatOperator',
    'build_shat',
    'exact_schur_shat',
    'PreconditionerKind',
    'InnerSettings',
    'PreconditionerState',
    'DEFAULT_ALPHA',
    'build_preconditioner',
    'apply_pr',
    'apply_prd',
    'apply_pbd',
    'apply_pss',
    'apply_preconditioner',
    'as_operator',
    'assemble_preconditioner',
]
