"""
Krylov subspace solvers

Provides:
- pcg: preconditioned conjugate gradient (SPD operator and preconditioner)
- gmres: full left-preconditioned GMRES, modified Gram-Schmidt Arnoldi
- fgmres: full flexible (right-preconditioned) GMRES
- minres: preconditioned MINRES for symmetric operators, SPD preconditioner
- SolveReport: iteration accounting and final residual/error

All solvers start from the zero vector and never restart.
"""

import time
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from src.errors import (
    DimensionMismatchError,
    IndefiniteOperatorError,
    IndefinitePreconditionerError,
    NonFiniteError,
)
from src.infrastructure.logging import get_logger
from src.solvers.operators import InnerTally, OperatorLike, as_apply, as_operator


DEFAULT_OUTER_MAXIT = 500
DEFAULT_INNER_MAXIT = 100
DEFAULT_INNER_TOL = 1e-6
DEFAULT_MINRES_TOL = 1e-7

# Gram-Schmidt is repeated when the orthogonalized vector shrinks below this
# fraction of the candidate norm
REORTHOGONALIZE_BELOW = 1e-3


@dataclass(frozen=True)
class SolveReport:
    """
    Outcome of one Krylov solve.

    res is always the true relative residual ||b - Op x|| / ||b|| of the
    returned iterate (or the recursive one for inner solves that skip the
    extra product). history holds the quantity the stopping rule monitors.
    """

    solver: str
    outer_iters: int
    converged: bool
    res: float
    err: Optional[float] = None
    wall_seconds: float = 0.0
    inner_iters_total: int = 0
    inner_applications: int = 0
    inner_pcg_solves: int = 0
    inner_pcg_iterations: int = 0
    history: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def inner_iters_per_outer(self) -> float:
        if self.outer_iters == 0:
            return 0.0
        return self.inner_iters_total / self.outer_iters

    @property
    def iter_pcg(self) -> int:
        """Rounded average PCG iterations per inner solve."""
        if self.inner_pcg_solves == 0:
            return 0
        return int(np.floor(self.inner_pcg_iterations / self.inner_pcg_solves + 0.5))

    @property
    def final_estimate(self) -> float:
        return self.history[-1] if self.history else float("nan")

    def with_tally(self, tally: InnerTally) -> "SolveReport":
        return replace(
            self,
            inner_iters_total=tally.total,
            inner_applications=tally.applications,
            inner_pcg_solves=tally.pcg_solves,
            inner_pcg_iterations=tally.pcg_iterations,
        )

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "outer_iters": self.outer_iters,
            "converged": self.converged,
            "res": self.res,
            "err": self.err,
            "wall_seconds": self.wall_seconds,
            "inner_iters_total": self.inner_iters_total,
            "inner_iters_per_outer": self.inner_iters_per_outer,
            "iter_pcg": self.iter_pcg,
        }


def _prepare(op: OperatorLike, b) -> Tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1:
        raise DimensionMismatchError("krylov", "1-D right-hand side", b.shape)
    A = as_operator(op, b.shape[0])
    if A.shape != (b.shape[0], b.shape[0]):
        raise DimensionMismatchError("krylov", A.shape, b.shape)
    if not np.all(np.isfinite(b)):
        raise NonFiniteError("krylov right-hand side")
    return b, A.matvec


def _relative_error(x: np.ndarray, x_exact) -> Optional[float]:
    if x_exact is None:
        return None
    x_exact = np.asarray(x_exact, dtype=np.float64)
    denom = np.linalg.norm(x_exact)
    diff = np.linalg.norm(x - x_exact)
    return float(diff / denom) if denom > 0 else float(diff)


def _finish(name, iters, converged, res, history, x, x_exact, start) -> SolveReport:
    report = SolveReport(
        solver=name,
        outer_iters=iters,
        converged=converged,
        res=float(res),
        err=_relative_error(x, x_exact),
        wall_seconds=time.perf_counter() - start,
        history=tuple(float(h) for h in history),
    )
    logger = get_logger()
    logger.debug(
        f"{name} finished",
        iterations=iters,
        converged=converged,
        res=report.res,
    )
    return report


# ============================================================================
# Conjugate gradient
# ============================================================================

def pcg(
    op: OperatorLike,
    b,
    precond: Optional[OperatorLike] = None,
    tol: float = DEFAULT_INNER_TOL,
    maxit: int = DEFAULT_INNER_MAXIT,
    x_exact=None,
    true_residual: bool = True,
    name: str = "pcg",
) -> Tuple[np.ndarray, SolveReport]:
    """
    Preconditioned conjugate gradient.

    Stops when the recursive relative residual ||r_k|| / ||b|| <= tol.

    Args:
        op: SPD operator
        b: right-hand side
        precond: SPD preconditioner r -> z (None = identity)
        tol: relative residual tolerance
        maxit: iteration limit
        x_exact: known solution, fills report.err
        true_residual: recompute ||b - op x|| at exit (one extra product)

    Raises:
        IndefiniteOperatorError: p^T op p <= 0 or non-finite
        IndefinitePreconditionerError: r^T precond(r) <= 0
    """
    start = time.perf_counter()
    b, A = _prepare(op, b)
    M = as_apply(precond, b.shape[0])
    x = np.zeros_like(b)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x, _finish(name, 0, True, 0.0, [0.0], x, x_exact, start)

    r = b.copy()
    z = M(r)
    rz = r @ z
    if not rz > 0.0:
        raise IndefinitePreconditionerError(name, 0, float(rz))
    p = z.copy()

    history = [1.0]
    converged = False
    iters = 0
    for k in range(1, maxit + 1):
        iters = k
        Ap = A(p)
        curvature = p @ Ap
        if not curvature > 0.0:
            raise IndefiniteOperatorError(name, k, float(curvature))
        step = rz / curvature
        x += step * p
        r -= step * Ap

        relative = np.linalg.norm(r) / bnorm
        history.append(relative)
        if relative <= tol:
            converged = True
            break

        z = M(r)
        rz_next = r @ z
        if not rz_next > 0.0:
            raise IndefinitePreconditionerError(name, k, float(rz_next))
        p = z + (rz_next / rz) * p
        rz = rz_next

    res = np.linalg.norm(b - A(x)) / bnorm if true_residual else history[-1]
    return x, _finish(name, iters, converged, res, history, x, x_exact, start)


# ============================================================================
# GMRES family
# ============================================================================

def gmres(
    op: OperatorLike,
    b,
    left_precond: Optional[OperatorLike] = None,
    tol: float = 1e-12,
    maxit: int = DEFAULT_OUTER_MAXIT,
    x_exact=None,
) -> Tuple[np.ndarray, SolveReport]:
    """
    Full left-preconditioned GMRES.

    Every iteration forms x_k and stops as soon as the true relative
    residual ||b - Op x_k|| / ||b|| <= tol. history records the
    preconditioned estimate ||P^{-1}(b - Op x_k)|| / ||P^{-1} b||, which is
    non-increasing.
    """
    return _arnoldi_solve("gmres", op, b, left_precond, tol, maxit, False, x_exact)


def fgmres(
    op: OperatorLike,
    b,
    right_precond: Optional[OperatorLike] = None,
    tol: float = DEFAULT_MINRES_TOL,
    maxit: int = DEFAULT_OUTER_MAXIT,
    x_exact=None,
) -> Tuple[np.ndarray, SolveReport]:
    """
    Full flexible GMRES; the preconditioner may change from call to call.

    The preconditioned directions z_k = P_k^{-1} v_k are stored and the
    iterate is x_k = Z_k y_k. Convergence is certified on the true residual.
    """
    return _arnoldi_solve("fgmres", op, b, right_precond, tol, maxit, True, x_exact)


def _arnoldi_solve(name, op, b, precond, tol, maxit, flexible, x_exact):
    start = time.perf_counter()
    b, A = _prepare(op, b)
    n = b.shape[0]
    M = as_apply(precond, n)
    x = np.zeros(n)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x, _finish(name, 0, True, 0.0, [0.0], x, x_exact, start)

    r0 = b.copy() if flexible else M(b)
    beta = np.linalg.norm(r0)
    if not np.isfinite(beta):
        raise NonFiniteError(f"{name} initial residual")
    if beta == 0.0:
        return x, _finish(name, 0, False, 1.0, [1.0], x, x_exact, start)

    V: List[np.ndarray] = [r0 / beta]
    Z: List[np.ndarray] = []
    R = np.zeros((maxit + 1, maxit))
    cs = np.zeros(maxit)
    sn = np.zeros(maxit)
    g = np.zeros(maxit + 1)
    g[0] = beta

    history = [1.0]
    converged = False
    res = 1.0
    iters = 0
    for k in range(maxit):
        iters = k + 1
        if flexible:
            zk = M(V[k])
            Z.append(zk)
            w = A(zk)
        else:
            w = M(A(V[k]))
        if not np.all(np.isfinite(w)):
            raise NonFiniteError(f"{name} Arnoldi step {iters}")

        candidate_norm = np.linalg.norm(w)
        h = np.zeros(k + 2)
        for i in range(k + 1):
            h[i] = V[i] @ w
            w = w - h[i] * V[i]
        h_next = np.linalg.norm(w)
        if h_next < REORTHOGONALIZE_BELOW * candidate_norm:
            for i in range(k + 1):
                correction = V[i] @ w
                h[i] += correction
                w = w - correction * V[i]
            h_next = np.linalg.norm(w)
        h[k + 1] = h_next

        for i in range(k):
            upper = cs[i] * h[i] + sn[i] * h[i + 1]
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1]
            h[i] = upper
        denom = np.hypot(h[k], h[k + 1])
        if denom == 0.0:
            # Op is singular on the Krylov space; x and res already hold the
            # least-squares iterate of the previous k columns
            break
        cs[k] = h[k] / denom
        sn[k] = h[k + 1] / denom
        h[k] = denom
        h[k + 1] = 0.0
        g[k + 1] = -sn[k] * g[k]
        g[k] = cs[k] * g[k]
        R[: k + 1, k] = h[: k + 1]

        history.append(abs(g[k + 1]) / beta)
        happy = h_next <= np.finfo(float).eps * candidate_norm

        x, res = _form_iterate(R, g, k + 1, Z if flexible else V, A, b, bnorm)
        if res <= tol:
            converged = True
            break
        if happy:
            break
        V.append(w / h_next)

    return x, _finish(name, iters, converged, res, history, x, x_exact, start)


def _form_iterate(R, g, k, basis, A, b, bnorm) -> Tuple[np.ndarray, float]:
    """Least-squares iterate from the first k Arnoldi columns and its true relative residual."""
    y = solve_triangular(R[:k, :k], g[:k], lower=False)
    x = np.asarray(basis[:k]).T @ y
    return x, float(np.linalg.norm(b - A(x)) / bnorm)


# ============================================================================
# MINRES
# ============================================================================

def minres(
    op: OperatorLike,
    b,
    spd_precond: Optional[OperatorLike] = None,
    tol: float = DEFAULT_MINRES_TOL,
    maxit: int = DEFAULT_OUTER_MAXIT,
    x_exact=None,
    certify_tol: Optional[float] = None,
) -> Tuple[np.ndarray, SolveReport]:
    """
    Preconditioned MINRES (Paige-Saunders recurrence).

    The monitored quantity is the preconditioned relative residual in the
    P^{-1} inner product, ||r_k||_{P^{-1}} / ||b||_{P^{-1}}, which the
    recurrence makes non-increasing.

    Args:
        op: symmetric operator (may be indefinite)
        spd_precond: SPD preconditioner application r -> P^{-1} r
        certify_tol: when set, a converged iterate must also have true
            relative residual <= certify_tol, else iteration continues

    Raises:
        IndefinitePreconditionerError: r^T P^{-1} r < 0 at some iteration
    """
    start = time.perf_counter()
    name = "minres"
    b, A = _prepare(op, b)
    n = b.shape[0]
    M = as_apply(spd_precond, n)
    x = np.zeros(n)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x, _finish(name, 0, True, 0.0, [0.0], x, x_exact, start)

    r1 = b.copy()
    y = M(r1)
    beta1 = r1 @ y
    if beta1 < 0.0:
        raise IndefinitePreconditionerError(name, 0, float(beta1))
    if beta1 == 0.0:
        return x, _finish(name, 0, False, 1.0, [1.0], x, x_exact, start)
    beta1 = np.sqrt(beta1)

    eps = np.finfo(float).eps
    old_beta = 0.0
    beta = beta1
    dbar = 0.0
    epsln = 0.0
    phibar = beta1
    cs = -1.0
    sn = 0.0
    w = np.zeros(n)
    w2 = np.zeros(n)
    r2 = r1

    history = [1.0]
    converged = False
    res = 1.0
    iters = 0
    for k in range(1, maxit + 1):
        iters = k
        v = y / beta
        y = A(v)
        if k >= 2:
            y = y - (beta / old_beta) * r1
        alpha = v @ y
        y = y - (alpha / beta) * r2
        r1 = r2
        r2 = y
        y = M(r2)
        old_beta = beta
        beta = r2 @ y
        if beta < 0.0:
            raise IndefinitePreconditionerError(name, k, float(beta))
        beta = np.sqrt(beta)

        old_eps = epsln
        delta = cs * dbar + sn * alpha
        gbar = sn * dbar - cs * alpha
        epsln = sn * beta
        dbar = -cs * beta

        gamma = max(np.hypot(gbar, beta), eps)
        cs = gbar / gamma
        sn = beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1 = w2
        w2 = w
        w = (v - old_eps * w1 - delta * w2) / gamma
        x = x + phi * w

        relative = abs(phibar) / beta1
        history.append(relative)
        if not np.isfinite(relative):
            raise NonFiniteError(f"minres iteration {k}")

        if relative <= tol or beta == 0.0:
            res = np.linalg.norm(b - A(x)) / bnorm
            if certify_tol is None or res <= certify_tol:
                converged = relative <= tol
                break
            if beta == 0.0:
                break
    else:
        res = np.linalg.norm(b - A(x)) / bnorm

    return x, _finish(name, iters, converged, res, history, x, x_exact, start)
