"""
Benchmark runner

Builds the problem and preconditioner for a CaseConfig, runs the outer
solver from a zero initial guess on b = A w*, and collects a CaseResult.
Wall time in the SolveReport covers the solve only; assembly and
factorization are reported as setup_seconds.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Iterable, List, Optional, Sequence

import numpy as np

from src.bench.cases import (
    CaseConfig,
    CaseResult,
    CaseStatus,
    ExactSolution,
    SolverKind,
)
from src.errors import SaddleBenchError
from src.infrastructure.config import BenchSettings, get_settings
from src.infrastructure.logging import get_logger
from src.infrastructure.monitoring import SETUP, SOLVE, get_monitor
from src.precond.preconditioners import (
    DEFAULT_ALPHA,
    InnerSettings,
    PreconditionerKind,
    as_operator,
    build_preconditioner,
)
from src.problems.example1 import (
    Variant,
    assemble_saddle,
    build_example1,
    manufactured_rhs,
    random_solution,
)
from src.solvers.ict import ict
from src.solvers.krylov import fgmres, gmres, minres, pcg
from src.solvers.operators import InnerTally


# the four preconditioners compared in each GMRES/FGMRES table
TABLE_PRECONDITIONERS = (
    PreconditionerKind.R,
    PreconditionerKind.RSS,
    PreconditionerKind.SS,
    PreconditionerKind.BD,
)
MINRES_TABLE_PRECONDITIONERS = (PreconditionerKind.RD, PreconditionerKind.BD)


@contextmanager
def _tracked(settings: BenchSettings, phase: str, metadata: dict):
    if settings.enable_monitoring:
        fields = {k: v for k, v in metadata.items() if k != "case_id"}
        with get_monitor().track_phase(phase, case_id=metadata.get("case_id"), **fields):
            yield
    else:
        yield


def _inner_settings(config: CaseConfig, settings: BenchSettings, metadata: dict) -> InnerSettings:
    plan = config.inner_plan(settings.inner_tol, settings.inner_maxit)
    metadata["inner"] = plan.to_dict()
    if plan.tightened:
        get_logger().debug("inner tolerance tightened for outer solver", **plan.to_dict())
    return InnerSettings(tol=plan.tol, maxit=plan.maxit, droptol=config.droptol)


def _run_pcg(config: CaseConfig, settings: BenchSettings, blocks, metadata: dict) -> tuple:
    with _tracked(settings, SETUP, metadata):
        setup_start = time.perf_counter()
        factor = ict(blocks.A, config.droptol)
        w_star = np.ones(blocks.n)
        if config.exact_solution is ExactSolution.RANDOM:
            w_star = random_solution(blocks.n, config.seed)
        b = blocks.A @ w_star
        setup_seconds = time.perf_counter() - setup_start
    metadata.update(ict_nnz=factor.nnz, ict_shift=factor.applied_shift)

    with _tracked(settings, SOLVE, metadata):
        _, report = pcg(
            blocks.A.to_scipy(),
            b,
            factor.solve,
            tol=config.effective_tol,
            maxit=config.maxit,
            x_exact=w_star,
        )
    return report, setup_seconds, None


def _run_saddle(config: CaseConfig, settings: BenchSettings, blocks, metadata: dict) -> tuple:
    with _tracked(settings, SETUP, metadata):
        setup_start = time.perf_counter()
        system = assemble_saddle(blocks, config.variant)
        w_star = None
        if config.exact_solution is ExactSolution.RANDOM:
            w_star = random_solution(system.N, config.seed)
        b, w_star = manufactured_rhs(system, w_star)
        state = build_preconditioner(
            blocks,
            config.precond,
            alpha=config.alpha,
            shat_mode=config.shat_mode,
            inner=_inner_settings(config, settings, metadata),
            dense_limit=settings.dense_limit,
        )
        setup_seconds = time.perf_counter() - setup_start
    metadata.update(N=system.N, nnz=system.matrix.nnz)
    if state.ict_of_A is not None:
        metadata.update(ict_nnz=state.ict_of_A.nnz, ict_shift=state.ict_of_A.applied_shift)

    tally = InnerTally()
    precond = None if state.kind is PreconditionerKind.NONE else as_operator(state, tally)
    operator = system.matrix.to_scipy()
    tol = config.effective_tol

    with _tracked(settings, SOLVE, metadata):
        if config.solver is SolverKind.GMRES:
            _, report = gmres(operator, b, precond, tol=tol, maxit=config.maxit, x_exact=w_star)
        elif config.solver is SolverKind.FGMRES:
            _, report = fgmres(operator, b, precond, tol=tol, maxit=config.maxit, x_exact=w_star)
        else:
            _, report = minres(
                operator, b, precond, tol=tol, maxit=config.maxit,
                x_exact=w_star, certify_tol=10.0 * tol,
            )
    return report.with_tally(tally), setup_seconds, state.alpha


def run_case(config: CaseConfig, settings: Optional[BenchSettings] = None) -> CaseResult:
    """
    Run one benchmark case.

    Numerical failures (breakdowns, inner solve failures) come back as a
    CaseResult with status error.

    Raises:
        IncompatibleCaseError: solver/preconditioner/variant cannot be combined
    """
    config.check_compatible()
    settings = settings or get_settings()
    logger = get_logger()
    metadata = {"case_id": config.case_id}

    with logger.case_context(config.case_id, p=config.p, nu=config.nu,
                             solver=config.solver.value, precond=config.precond.value):
        logger.info("case started")
        try:
            blocks = build_example1(config.p, config.nu)
            if config.solver is SolverKind.PCG:
                report, setup_seconds, alpha = _run_pcg(config, settings, blocks, metadata)
            else:
                report, setup_seconds, alpha = _run_saddle(config, settings, blocks, metadata)
        except SaddleBenchError as e:
            if e.is_configuration_error:
                raise
            logger.error("case failed", code=e.code, reason=e.short_message())
            return CaseResult(
                config=config,
                status=CaseStatus.ERROR,
                error=e.short_message(),
                alpha=config.alpha,
                metadata=metadata,
            )

        status = CaseStatus.CONVERGED if report.converged else CaseStatus.MAXIT
        logger.info(
            "case finished",
            status=status.value,
            iterations=report.outer_iters,
            iter_pcg=report.iter_pcg,
            res=report.res,
            err=report.err,
            setup_seconds=setup_seconds,
            solve_seconds=report.wall_seconds,
        )
        return CaseResult(
            config=config,
            status=status,
            report=report,
            setup_seconds=setup_seconds,
            alpha=alpha,
            metadata=metadata,
        )


def _isolated(config: CaseConfig, settings: BenchSettings) -> CaseResult:
    try:
        return run_case(config, settings)
    except SaddleBenchError as e:
        return CaseResult(config=config, status=CaseStatus.ERROR, error=e.short_message())
    except Exception as e:
        get_logger().error("unexpected case failure", exc_info=True, case_id=config.case_id)
        return CaseResult(config=config, status=CaseStatus.ERROR, error=f"{type(e).__name__}: {e}")


def run_sweep(
    configs: Sequence[CaseConfig],
    parallel: Optional[bool] = None,
    max_workers: Optional[int] = None,
    settings: Optional[BenchSettings] = None,
) -> List[CaseResult]:
    """
    Run every case; results keep the input order and one failing case
    never aborts the others.
    """
    settings = settings or get_settings()
    parallel = settings.parallel_cases if parallel is None else parallel
    configs = list(configs)
    if not parallel or len(configs) < 2:
        return [_isolated(config, settings) for config in configs]

    workers = max_workers or settings.max_workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda config: _isolated(config, settings), configs))


def table_configs(
    nu: float,
    solver: SolverKind,
    ps: Iterable[int],
    preconds: Optional[Sequence[PreconditionerKind]] = None,
    **overrides,
) -> List[CaseConfig]:
    """Cases of one table family: every grid size against every compared preconditioner."""
    solver = SolverKind(solver)
    if preconds is None:
        preconds = MINRES_TABLE_PRECONDITIONERS if solver is SolverKind.MINRES else TABLE_PRECONDITIONERS
    variant = Variant.PLUS if solver is SolverKind.MINRES else Variant.MINUS
    return [
        CaseConfig(
            p=p,
            nu=nu,
            variant=variant,
            solver=solver,
            precond=precond,
            alpha=overrides.get("alpha", DEFAULT_ALPHA[PreconditionerKind(precond)]),
            **{k: v for k, v in overrides.items() if k != "alpha"},
        )
        for p in ps
        for precond in preconds
    ]
