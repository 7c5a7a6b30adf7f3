"""
Benchmark case configuration and results
"""

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from src.errors import IncompatibleCaseError, InvalidConfigurationError
from src.precond.preconditioners import PreconditionerKind
from src.precond.shat import ShatMode
from src.problems.example1 import Variant
from src.solvers.krylov import SolveReport


class SolverKind(str, Enum):
    GMRES = "gmres"
    FGMRES = "fgmres"
    MINRES = "minres"
    PCG = "pcg"


class ExactSolution(str, Enum):
    ONES = "ones"
    RANDOM = "random"


class CaseStatus(str, Enum):
    CONVERGED = "converged"
    MAXIT = "maxit"
    ERROR = "error"


DEFAULT_TOL: Dict[SolverKind, float] = {
    SolverKind.GMRES: 1e-12,
    SolverKind.FGMRES: 1e-7,
    SolverKind.MINRES: 1e-7,
    SolverKind.PCG: 1e-6,
}

MINRES_PRECONDITIONERS = (PreconditionerKind.RD, PreconditionerKind.BD)

# solvers whose preconditioner must be the same operator on every call
FIXED_PRECONDITIONER_SOLVERS = (SolverKind.GMRES, SolverKind.MINRES)

# automatic inner tolerance of FIXED_PRECONDITIONER_SOLVERS, relative to the outer tol
INNER_TIGHTENING = 1e-2


def _coerce(enum_type, value, field_name: str):
    try:
        return enum_type(value)
    except ValueError:
        allowed = ", ".join(member.value for member in enum_type)
        raise InvalidConfigurationError(field_name, value, f"must be one of: {allowed}")


@dataclass(frozen=True)
class CaseConfig:
    """
    One (grid, nu, preconditioner, solver) benchmark case.

    alpha and tol left as None take the per-preconditioner and per-solver
    defaults; inner_tol and inner_maxit left as None follow inner_plan().
    """

    p: int
    nu: float = 1.0
    variant: Variant = Variant.MINUS
    solver: SolverKind = SolverKind.GMRES
    precond: PreconditionerKind = PreconditionerKind.R
    alpha: Optional[float] = None
    tol: Optional[float] = None
    maxit: int = 500
    inner_tol: Optional[float] = None
    inner_maxit: Optional[int] = None
    shat_mode: ShatMode = ShatMode.FULL
    droptol: float = 1e-2
    seed: int = 0
    exact_solution: ExactSolution = ExactSolution.ONES

    def __post_init__(self):
        object.__setattr__(self, "variant", _coerce(Variant, self.variant, "variant"))
        object.__setattr__(self, "solver", _coerce(SolverKind, self.solver, "solver"))
        object.__setattr__(self, "precond", _coerce(PreconditionerKind, self.precond, "precond"))
        object.__setattr__(self, "shat_mode", _coerce(ShatMode, self.shat_mode, "shat_mode"))
        object.__setattr__(
            self, "exact_solution", _coerce(ExactSolution, self.exact_solution, "exact_solution")
        )

        if not isinstance(self.p, int) or self.p < 2:
            raise InvalidConfigurationError("p", self.p, "must be an integer >= 2")
        for name in ("nu", "droptol"):
            if not getattr(self, name) > 0:
                raise InvalidConfigurationError(name, getattr(self, name), "must be positive")
        if self.alpha is not None and not self.alpha > 0:
            raise InvalidConfigurationError("alpha", self.alpha, "must be positive")
        if self.tol is not None and not 0 < self.tol < 1:
            raise InvalidConfigurationError("tol", self.tol, "must satisfy 0 < tol < 1")
        if self.inner_tol is not None and not 0 < self.inner_tol < 1:
            raise InvalidConfigurationError("inner_tol", self.inner_tol, "must satisfy 0 < inner_tol < 1")
        for name in ("maxit", "inner_maxit"):
            if getattr(self, name) is not None and getattr(self, name) < 1:
                raise InvalidConfigurationError(name, getattr(self, name), "must be >= 1")

    @property
    def effective_tol(self) -> float:
        return DEFAULT_TOL[self.solver] if self.tol is None else self.tol

    def inner_plan(self, protocol_tol: float = 1e-6, protocol_maxit: int = 100) -> "InnerPlan":
        """
        Inner PCG settings for this case.

        Configured inner_tol/inner_maxit are used as given. Otherwise the
        protocol values apply, except that GMRES and MINRES (which need the
        same preconditioner on every call) get tol = min(protocol_tol,
        INNER_TIGHTENING * outer tol) with the iteration limit scaled by the
        extra digits asked for.
        """
        if self.inner_tol is not None:
            maxit = self.inner_maxit if self.inner_maxit is not None else protocol_maxit
            return InnerPlan(tol=self.inner_tol, maxit=maxit, tightened=False)

        tol = protocol_tol
        if self.solver in FIXED_PRECONDITIONER_SOLVERS:
            tol = min(protocol_tol, INNER_TIGHTENING * self.effective_tol)
        tightened = tol < protocol_tol
        maxit = protocol_maxit
        if tightened:
            digits = math.log10(tol) / math.log10(protocol_tol)
            maxit = math.ceil(protocol_maxit * digits - 1e-9)
        if self.inner_maxit is not None:
            maxit = self.inner_maxit
        return InnerPlan(tol=tol, maxit=maxit, tightened=tightened)

    @property
    def case_id(self) -> str:
        return f"p{self.p}-nu{self.nu:g}-{self.solver.value}-{self.precond.value}"

    def check_compatible(self):
        """
        Raises:
            IncompatibleCaseError: the solver cannot run on this variant/preconditioner
        """
        solver, precond, variant = self.solver, self.precond, self.variant

        def incompatible(reason: str) -> IncompatibleCaseError:
            return IncompatibleCaseError(solver.value, precond.value, variant.value, reason, case_id=self.case_id)

        if solver is SolverKind.MINRES:
            if variant is not Variant.PLUS:
                raise incompatible("MINRES needs the symmetric variant (plus)")
            if precond not in MINRES_PRECONDITIONERS:
                raise incompatible("MINRES needs an SPD preconditioner (RD or BD)")
        elif solver is SolverKind.PCG:
            if precond is not PreconditionerKind.NONE:
                raise incompatible("PCG runs on the leading block with ICT; use precond = none")
        elif variant is not Variant.MINUS:
            raise incompatible("GMRES and FGMRES run on the minus variant")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, Enum):
                data[key] = value.value
        return data


@dataclass(frozen=True)
class InnerPlan:
    """Resolved inner PCG settings; tightened marks an automatic tolerance below the protocol one."""

    tol: float
    maxit: int
    tightened: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class TableRow:
    """One line of the results table."""

    p: int
    nu: float
    solver: str
    precond: str
    alpha: Optional[float]
    iter: int
    iter_pcg: int
    cpu_s: float
    err: Optional[float]
    res: float
    status: str


@dataclass(frozen=True)
class CaseResult:
    config: CaseConfig
    status: CaseStatus
    report: Optional[SolveReport] = None
    error: str = ""
    setup_seconds: float = 0.0
    alpha: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status is CaseStatus.CONVERGED

    @property
    def status_text(self) -> str:
        if self.status is CaseStatus.ERROR:
            return f"error:{self.error}"
        return self.status.value

    def to_row(self) -> TableRow:
        report = self.report
        return TableRow(
            p=self.config.p,
            nu=self.config.nu,
            solver=self.config.solver.value,
            precond=self.config.precond.value,
            alpha=self.alpha if self.alpha is not None else self.config.alpha,
            iter=report.outer_iters if report else 0,
            iter_pcg=report.iter_pcg if report else 0,
            cpu_s=report.wall_seconds if report else 0.0,
            err=report.err if report else None,
            res=report.res if report else float("nan"),
            status=self.status_text,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "status": self.status_text,
            "setup_seconds": self.setup_seconds,
            "alpha": self.alpha,
            "inner": self.metadata.get("inner"),
            "report": self.report.to_dict() if self.report else None,
        }
