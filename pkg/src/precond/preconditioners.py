"""
Block preconditioners for double saddle-point systems

Provides:
- PreconditionerKind, InnerSettings, PreconditionerState
- build_preconditioner(blocks, kind, ...)
- apply_pr, apply_prd, apply_pbd, apply_pss and the apply_preconditioner dispatcher
- assemble_preconditioner: dense P for oracles and spectral checks

With r = (r1; r2; r3) and w = (x; y; z):

P_R   = [A  B^T 0; -B S_hat 0; 0 C alpha I]
P_RD  = [A  B^T 0;  B S_hat 0; 0 0 alpha I]
P_BD  = blockdiag(A, S_hat, C S_hat^{-1} C^T)
P_SS  = 1/2 [alpha I + A  B^T 0; -B alpha I -C^T; 0 C alpha I]
P_RSS = 1/2 [A            B^T 0; -B alpha I -C^T; 0 C alpha I]

Every application is a block elimination; solves with A (or alpha I + A)
and with Schur-type operators are done by inner Krylov iterations, so one
application is exact up to the inner tolerance.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator

from src.errors import (
    DenseGuardError,
    DimensionMismatchError,
    DomainError,
    IndefiniteOperatorError,
    IndefinitePreconditionerError,
    InnerSolveError,
    PreconditionerKindError,
)
from src.infrastructure.logging import get_logger
from src.linalg.dense import DENSE_LIMIT
from src.linalg.sparse import SparseMatrix, add, identity, scale, spmv, transpose
from src.precond.shat import ShatMode, ShatOperator, build_shat, exact_schur_shat
from src.problems.example1 import ProblemBlocks
from src.solvers.ict import IctFactor, ict
from src.solvers.krylov import minres, pcg
from src.solvers.operators import InnerTally, make_operator


class PreconditionerKind(str, Enum):
    R = "R"
    RD = "RD"
    BD = "BD"
    SS = "SS"
    RSS = "RSS"
    NONE = "none"


DEFAULT_ALPHA: Dict[PreconditionerKind, float] = {
    PreconditionerKind.R: 2.0,
    PreconditionerKind.RD: 1.0,
    PreconditionerKind.BD: 1.0,
    PreconditionerKind.SS: 0.01,
    PreconditionerKind.RSS: 0.01,
    PreconditionerKind.NONE: 1.0,
}

DENSE_ASSEMBLY_LIMIT = 1024


@dataclass(frozen=True)
class InnerSettings:
    """Inner Krylov settings shared by every solve inside one application."""

    tol: float = 1e-6
    maxit: int = 100
    droptol: float = 1e-2

    def __post_init__(self):
        if not 0 < self.tol < 1:
            raise DomainError("inner_tol", self.tol, "0 < inner_tol < 1")
        if self.maxit < 1:
            raise DomainError("inner_maxit", self.maxit, "inner_maxit >= 1")
        if not self.droptol > 0:
            raise DomainError("droptol", self.droptol, "droptol > 0")


@dataclass(frozen=True, eq=False)
class PreconditionerState:
    """
    Everything one application of P^{-1} needs.

    ict_of_A is the ICT factor of the leading block used by the kind:
    alpha I + A for SS, A otherwise. For SS/RSS, shat holds
    M_y = alpha I + (1/alpha) C^T C.
    """

    kind: PreconditionerKind
    alpha: float
    blocks: ProblemBlocks
    shat: Optional[ShatOperator]
    ict_of_A: Optional[IctFactor]
    inner: InnerSettings
    leading: Optional[SparseMatrix] = None
    exact_S: Optional[np.ndarray] = None
    Bt: Optional[SparseMatrix] = None
    Ct: Optional[SparseMatrix] = None

    @property
    def N(self) -> int:
        return self.blocks.N

    def with_inner(self, **changes) -> "PreconditionerState":
        """Same factors, different inner tolerance/iteration limit."""
        return replace(self, inner=replace(self.inner, **changes))


def build_preconditioner(
    blocks: ProblemBlocks,
    kind: PreconditionerKind,
    alpha: Optional[float] = None,
    shat_mode: ShatMode = ShatMode.FULL,
    inner: Optional[InnerSettings] = None,
    dense_limit: int = DENSE_LIMIT,
) -> PreconditionerState:
    """
    Factor everything a preconditioner needs.

    Args:
        blocks: problem blocks
        kind: which preconditioner
        alpha: regularization (None = per-kind default)
        shat_mode: full, diagonal or exact S_hat (R, RD, BD only)
        inner: inner solver settings
        dense_limit: largest S_hat factored densely
    """
    kind = PreconditionerKind(kind)
    alpha = DEFAULT_ALPHA[kind] if alpha is None else float(alpha)
    if not alpha > 0:
        raise DomainError("alpha", alpha, "alpha > 0")
    inner = inner or InnerSettings()
    shat_mode = ShatMode(shat_mode)

    common = dict(
        kind=kind,
        alpha=alpha,
        blocks=blocks,
        inner=inner,
        Bt=transpose(blocks.B),
        Ct=transpose(blocks.C),
    )
    if kind is PreconditionerKind.NONE:
        return PreconditionerState(shat=None, ict_of_A=None, **common)

    logger = get_logger()
    with logger.performance_log(f"build preconditioner {kind.value}"):
        if kind in (PreconditionerKind.SS, PreconditionerKind.RSS):
            leading = blocks.A
            if kind is PreconditionerKind.SS:
                leading = add(blocks.A, scale(identity(blocks.n), alpha))
            return PreconditionerState(
                shat=build_shat(blocks.C, alpha, ShatMode.FULL, dense_limit),
                ict_of_A=ict(leading, inner.droptol),
                leading=leading,
                **common,
            )

        exact_S = None
        if shat_mode is ShatMode.EXACT:
            shat = exact_schur_shat(blocks.A, blocks.B, alpha)
            exact_S = shat.toarray()
        else:
            shat = build_shat(blocks.C, alpha, shat_mode, dense_limit)
        return PreconditionerState(
            shat=shat,
            ict_of_A=ict(blocks.A, inner.droptol),
            leading=blocks.A,
            exact_S=exact_S,
            **common,
        )


# ============================================================================
# Helpers
# ============================================================================

def _require_kind(state: PreconditionerState, expected: PreconditionerKind, routine: str):
    if state.kind is not expected:
        raise PreconditionerKindError(f"{routine} ({expected.value})", state.kind.value)


def _split(state: PreconditionerState, r):
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (state.N,):
        raise DimensionMismatchError("preconditioner application", state.N, r.shape)
    n, m = state.blocks.n, state.blocks.m
    return r[:n], r[n: n + m], r[n + m:]


def _inner_pcg(
    state: PreconditionerState,
    apply: Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    precond: Optional[Callable[[np.ndarray], np.ndarray]],
    stage: str,
    tally: Optional[InnerTally],
    counts_as_pcg: bool = True,
) -> np.ndarray:
    op = make_operator(rhs.shape[0], apply, name=stage)
    x, report = pcg(
        op,
        rhs,
        precond,
        tol=state.inner.tol,
        maxit=state.inner.maxit,
        true_residual=False,
        name=stage,
    )
    if not report.converged:
        raise InnerSolveError(stage, report)
    if tally is not None:
        if counts_as_pcg:
            tally.record_pcg(report.outer_iters)
        else:
            tally.record_aux(report.outer_iters)
    return x


def _solve_leading(state: PreconditionerState, rhs: np.ndarray, stage: str, tally) -> np.ndarray:
    """x = G^{-1} rhs by ICT-preconditioned PCG on the leading block."""
    G = state.leading
    return _inner_pcg(state, lambda v: spmv(G, v), rhs, state.ict_of_A.solve, stage, tally)


# ============================================================================
# Applications
# ============================================================================

def apply_pr(state: PreconditionerState, r, tally: Optional[InnerTally] = None) -> np.ndarray:
    """
    w = P_R(S_hat)^{-1} r.

    1. (A + B^T S_hat^{-1} B) x = r1 - B^T S_hat^{-1} r2   (PCG, ICT(A))
    2. y = S_hat^{-1} (B x + r2)
    3. z = (r3 - C y) / alpha
    """
    _require_kind(state, PreconditionerKind.R, "apply_pr")
    r1, r2, r3 = _split(state, r)
    A, B, C = state.blocks.A, state.blocks.B, state.blocks.C
    Bt, shat = state.Bt, state.shat

    rhs = r1 - spmv(Bt, shat.solve(r2))

    def step1(v):
        return spmv(A, v) + spmv(Bt, shat.solve(spmv(B, v)))

    x = _inner_pcg(state, step1, rhs, state.ict_of_A.solve, "P_R step 1", tally)
    y = shat.solve(spmv(B, x) + r2)
    z = (r3 - spmv(C, y)) / state.alpha

    if tally is not None:
        tally.record_application()
    return np.concatenate([x, y, z])


def apply_prd(state: PreconditionerState, r, tally: Optional[InnerTally] = None) -> np.ndarray:
    """
    w = P_RD^{-1} r.

    x from (A - B^T S_hat^{-1} B) x = r1 - B^T S_hat^{-1} r2 by CG, restarted
    as MINRES if CG meets indefiniteness; y = S_hat^{-1}(r2 - B x); z = r3 / alpha.
    """
    _require_kind(state, PreconditionerKind.RD, "apply_prd")
    r1, r2, r3 = _split(state, r)
    A, B = state.blocks.A, state.blocks.B
    Bt, shat = state.Bt, state.shat

    rhs = r1 - spmv(Bt, shat.solve(r2))

    def schur(v):
        return spmv(A, v) - spmv(Bt, shat.solve(spmv(B, v)))

    stage = "P_RD Schur"
    try:
        x = _inner_pcg(state, schur, rhs, state.ict_of_A.solve, stage, tally)
    except (IndefiniteOperatorError, IndefinitePreconditionerError) as exc:
        get_logger().debug("P_RD Schur block is indefinite, switching to MINRES", reason=exc.code)
        x, report = minres(
            make_operator(rhs.shape[0], schur, name=stage),
            rhs,
            state.ict_of_A.solve,
            tol=state.inner.tol,
            maxit=state.inner.maxit,
        )
        if not report.converged:
            raise InnerSolveError(f"{stage} (MINRES)", report)
        if tally is not None:
            tally.record_pcg(report.outer_iters)

    y = shat.solve(r2 - spmv(B, x))
    z = r3 / state.alpha

    if tally is not None:
        tally.record_application()
    return np.concatenate([x, y, z])


def apply_pbd(state: PreconditionerState, r, tally: Optional[InnerTally] = None) -> np.ndarray:
    """w = blockdiag(A, S_hat, C S_hat^{-1} C^T)^{-1} r."""
    _require_kind(state, PreconditionerKind.BD, "apply_pbd")
    r1, r2, r3 = _split(state, r)
    C, Ct, shat = state.blocks.C, state.Ct, state.shat

    x = _solve_leading(state, r1, "P_BD A-block", tally)
    y = shat.solve(r2)

    def third_block(v):
        return spmv(C, shat.solve(spmv(Ct, v)))

    z = _inner_pcg(state, third_block, r3, None, "P_BD C-block", tally, counts_as_pcg=False)

    if tally is not None:
        tally.record_application()
    return np.concatenate([x, y, z])


def apply_pss(
    state: PreconditionerState,
    r,
    relaxed: Optional[bool] = None,
    tally: Optional[InnerTally] = None,
) -> np.ndarray:
    """
    w = P_SS^{-1} r (relaxed: P_RSS^{-1} r), G = alpha I + A or A.

    (M_y + B G^{-1} B^T) y = 2 r2 + (2/alpha) C^T r3 + 2 B G^{-1} r1,
    M_y = alpha I + (1/alpha) C^T C; then
    x = G^{-1}(2 r1 - B^T y) and z = (2 r3 - C y) / alpha.
    """
    if relaxed is None:
        relaxed = state.kind is PreconditionerKind.RSS
    expected = PreconditionerKind.RSS if relaxed else PreconditionerKind.SS
    _require_kind(state, expected, "apply_pss")

    r1, r2, r3 = _split(state, r)
    B, C = state.blocks.B, state.blocks.C
    Bt, Ct, m_y = state.Bt, state.Ct, state.shat
    alpha = state.alpha

    rhs = (
        2.0 * r2
        + (2.0 / alpha) * spmv(Ct, r3)
        + 2.0 * spmv(B, _solve_leading(state, r1, "P_SS G-solve", tally))
    )

    def reduced(v):
        return m_y.apply(v) + spmv(B, _solve_leading(state, spmv(Bt, v), "P_SS G-solve", tally))

    y = _inner_pcg(state, reduced, rhs, m_y.solve, "P_SS y-block", tally, counts_as_pcg=False)
    x = _solve_leading(state, 2.0 * r1 - spmv(Bt, y), "P_SS G-solve", tally)
    z = (2.0 * r3 - spmv(C, y)) / alpha

    if tally is not None:
        tally.record_application()
    return np.concatenate([x, y, z])


def apply_preconditioner(state: PreconditionerState, r, tally: Optional[InnerTally] = None) -> np.ndarray:
    """Dispatch on state.kind; kind none returns a copy of r."""
    kind = state.kind
    if kind is PreconditionerKind.R:
        return apply_pr(state, r, tally)
    if kind is PreconditionerKind.RD:
        return apply_prd(state, r, tally)
    if kind is PreconditionerKind.BD:
        return apply_pbd(state, r, tally)
    if kind in (PreconditionerKind.SS, PreconditionerKind.RSS):
        return apply_pss(state, r, tally=tally)
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (state.N,):
        raise DimensionMismatchError("preconditioner application", state.N, r.shape)
    if tally is not None:
        tally.record_application()
    return r.copy()


def as_operator(state: PreconditionerState, tally: Optional[InnerTally] = None) -> LinearOperator:
    """P^{-1} as a LinearOperator, accumulating inner iterations into tally."""
    return make_operator(
        state.N,
        lambda r: apply_preconditioner(state, r, tally),
        name=f"P_{state.kind.value}^-1",
    )


# ============================================================================
# Dense assembly
# ============================================================================

def assemble_preconditioner(state: PreconditionerState, max_dim: int = DENSE_ASSEMBLY_LIMIT) -> np.ndarray:
    """
    Dense P (not its inverse) with the S_hat held by the state.

    Raises:
        DenseGuardError: N > max_dim
    """
    blocks = state.blocks
    if blocks.N > max_dim:
        raise DenseGuardError(blocks.N, max_dim, what="N")
    n, m, l = blocks.n, blocks.m, blocks.l
    A = blocks.A.toarray()
    B = blocks.B.toarray()
    C = blocks.C.toarray()
    alpha = state.alpha
    kind = state.kind

    P = np.zeros((blocks.N, blocks.N))
    xs, ys, zs = slice(0, n), slice(n, n + m), slice(n + m, n + m + l)

    if kind is PreconditionerKind.NONE:
        return np.eye(blocks.N)

    if kind in (PreconditionerKind.SS, PreconditionerKind.RSS):
        P[xs, xs] = A + (alpha * np.eye(n) if kind is PreconditionerKind.SS else 0.0)
        P[xs, ys] = B.T
        P[ys, xs] = -B
        P[ys, ys] = alpha * np.eye(m)
        P[ys, zs] = -C.T
        P[zs, ys] = C
        P[zs, zs] = alpha * np.eye(l)
        return 0.5 * P

    S_hat = state.shat.toarray()
    if kind is PreconditionerKind.BD:
        P[xs, xs] = A
        P[ys, ys] = S_hat
        P[zs, zs] = C @ state.shat.solve(C.T)
        return P

    P[xs, xs] = A
    P[xs, ys] = B.T
    P[ys, ys] = S_hat
    P[zs, zs] = alpha * np.eye(l)
    if kind is PreconditionerKind.R:
        P[ys, xs] = -B
        P[zs, ys] = C
    else:
        P[ys, xs] = B
    return P
