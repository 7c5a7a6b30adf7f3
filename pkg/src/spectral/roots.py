"""
The eta relation and its quadratic

Eigenvalues lambda of P_R^{-1} A_minus outside {1, 1/2} are tied to the
eigenvalues eta of S_C = C S^{-1} C^T by

    eta = alpha * lambda * (2 lambda - 1) / (lambda - 1)

which rearranges to the quadratic 2 alpha lambda^2 - (alpha + eta) lambda + eta = 0
(the "corrected" form). The printed form 2 alpha lambda^2 - alpha (eta + 1) lambda + eta = 0
is evaluated as well; a consistency flag tells which roots really satisfy the relation.
"""

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.errors import DomainError, PoleError


CONSISTENCY_TOL = 1e-10

Number = Union[float, complex]


class QuadraticForm(str, Enum):
    PRINTED = "printed"
    CORRECTED = "corrected"


def eta_of_lambda(alpha: float, lam: Number) -> Number:
    """eta = alpha * lam * (2 lam - 1) / (lam - 1); works for complex lam."""
    if lam == 1:
        raise PoleError(alpha)
    return alpha * lam * (2 * lam - 1) / (lam - 1)


def _solve_quadratic(a: float, b: float, c: float) -> Tuple[complex, complex, float]:
    """Roots of a x^2 + b x + c in ascending (real part, imaginary part) order."""
    disc = b * b - 4.0 * a * c
    if disc < 0.0 and -disc <= 4.0 * np.finfo(float).eps * b * b:
        disc = 0.0
    if disc >= 0.0:
        root = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(root, b))
        if q == 0.0:
            r1 = r2 = -b / (2.0 * a)
        else:
            r1, r2 = q / a, c / q
        low, high = sorted((r1, r2))
        return complex(low), complex(high), disc
    re = -b / (2.0 * a)
    im = math.sqrt(-disc) / (2.0 * abs(a))
    return complex(re, -im), complex(re, im), disc


@dataclass(frozen=True)
class QuadraticRoots:
    """Both roots of one quadratic form for a single (alpha, eta)."""

    form: QuadraticForm
    alpha: float
    eta: float
    coefficients: Tuple[float, float, float]
    roots: Tuple[complex, complex]
    consistent: Tuple[bool, bool]
    discriminant: float

    @property
    def is_real(self) -> bool:
        return self.discriminant >= 0.0

    @property
    def smaller(self) -> complex:
        return self.roots[0]

    @property
    def larger(self) -> complex:
        return self.roots[1]

    def consistent_roots(self) -> List[complex]:
        return [r for r, ok in zip(self.roots, self.consistent) if ok]


@dataclass(frozen=True)
class LambdaRoots:
    """Printed and corrected root pairs for one (alpha, eta)."""

    printed: QuadraticRoots
    corrected: QuadraticRoots

    def consistent_roots(self) -> List[complex]:
        """
        Roots that satisfy the eta relation.

        Consistent printed-form roots solve the corrected quadratic too, so
        the corrected pair is the complete list.
        """
        return self.corrected.consistent_roots()


def _is_consistent(alpha: float, eta: float, root: complex, rel_tol: float) -> bool:
    if root == 1:
        return False
    value = eta_of_lambda(alpha, root)
    return abs(value - eta) <= rel_tol * abs(eta)


def _quadratic(form: QuadraticForm, alpha: float, eta: float, rel_tol: float) -> QuadraticRoots:
    a = 2.0 * alpha
    if form is QuadraticForm.PRINTED:
        b = -alpha * (eta + 1.0)
    else:
        b = -(alpha + eta)
    c = eta
    low, high, disc = _solve_quadratic(a, b, c)
    return QuadraticRoots(
        form=form,
        alpha=alpha,
        eta=eta,
        coefficients=(a, b, c),
        roots=(low, high),
        consistent=(
            _is_consistent(alpha, eta, low, rel_tol),
            _is_consistent(alpha, eta, high, rel_tol),
        ),
        discriminant=disc,
    )


def lambda_roots(alpha: float, eta: float, rel_tol: float = CONSISTENCY_TOL) -> LambdaRoots:
    """
    Roots of both quadratic forms with per-root consistency flags.

    Args:
        alpha: regularization, > 0
        eta: eigenvalue of S_C, > 0
    """
    if not alpha > 0:
        raise DomainError("alpha", alpha, "alpha > 0")
    if not eta > 0:
        raise DomainError("eta", eta, "eta > 0")
    alpha, eta = float(alpha), float(eta)
    return LambdaRoots(
        printed=_quadratic(QuadraticForm.PRINTED, alpha, eta, rel_tol),
        corrected=_quadratic(QuadraticForm.CORRECTED, alpha, eta, rel_tol),
    )


def printed_root_formula(alpha: float, eta: float) -> Tuple[complex, complex]:
    """
    The printed closed form
        lambda_{1,2} = (eta+1)/4 * (1 +/- sqrt(1 - 8 alpha eta / (alpha^2 (eta+1))))
    evaluated verbatim (complex when the radicand is negative).
    """
    radicand = 1.0 - 8.0 * alpha * eta / (alpha**2 * (eta + 1.0))
    root = cmath.sqrt(radicand)
    scale = 0.25 * (eta + 1.0)
    return complex(scale * (1 + root)), complex(scale * (1 - root))


# ============================================================================
# Printed eigenvalue interval
# ============================================================================

@dataclass(frozen=True)
class PrintedInterval:
    """
    The published eigenvalue bounds evaluated verbatim.

    lower/upper are the endpoints of the published interval;
    lambda1_range and lambda2_range are the bounds stated for the two roots.
    Endpoints whose radicand is negative are NaN and valid is False.
    """

    alpha: float
    eta_min: float
    eta_max: float
    radicand_lower: float
    radicand_upper: float
    lower: float
    upper: float
    lambda1_range: Tuple[float, float]
    lambda2_range: Tuple[float, float]
    valid: bool
    reason: str = ""

    def contains(self, lam: float, slack: float = 0.0) -> bool:
        if not self.valid:
            return False
        return self.lower - slack <= lam <= self.upper + slack

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "eta_min": self.eta_min,
            "eta_max": self.eta_max,
            "radicand_lower": self.radicand_lower,
            "radicand_upper": self.radicand_upper,
            "lower": self.lower,
            "upper": self.upper,
            "lambda1_range": list(self.lambda1_range),
            "lambda2_range": list(self.lambda2_range),
            "valid": self.valid,
            "reason": self.reason,
        }


def printed_bound_interval(alpha: float, eta_min: float, eta_max: float) -> PrintedInterval:
    """Evaluate the printed interval formulas; invalidity is reported, never raised."""
    alpha, eta_min, eta_max = float(alpha), float(eta_min), float(eta_max)
    rad_lo = 1.0 - 8.0 * eta_min / (alpha * (eta_max + 1.0))
    rad_hi = 1.0 - 8.0 * eta_max / (alpha * (eta_min + 1.0))

    reasons = []
    if alpha < 2.0:
        reasons.append("alpha < 2")
    if rad_lo < 0.0:
        reasons.append(f"negative radicand at lower endpoint ({rad_lo:.6g})")
    if rad_hi < 0.0:
        reasons.append(f"negative radicand at upper endpoint ({rad_hi:.6g})")

    sq_lo = math.sqrt(rad_lo) if rad_lo >= 0.0 else float("nan")
    sq_hi = math.sqrt(rad_hi) if rad_hi >= 0.0 else float("nan")
    s_lo = 0.25 * (eta_min + 1.0)
    s_hi = 0.25 * (eta_max + 1.0)

    return PrintedInterval(
        alpha=alpha,
        eta_min=eta_min,
        eta_max=eta_max,
        radicand_lower=rad_lo,
        radicand_upper=rad_hi,
        lower=s_lo * sq_lo,
        upper=s_hi * sq_hi,
        lambda1_range=(s_lo * (1.0 + sq_lo), s_hi * (1.0 + sq_hi)),
        lambda2_range=(s_lo * (1.0 - sq_lo), s_hi * (1.0 - sq_hi)),
        valid=not reasons,
        reason="; ".join(reasons),
    )


# ============================================================================
# Large-alpha behaviour
# ============================================================================

@dataclass(frozen=True)
class LimitSweep:
    """
    Root magnitudes over a list of alphas (rows) and etas (columns).

    The printed_* arrays come from the printed quadratic, corrected_* from the
    corrected one; smaller/larger are by modulus.
    """

    alphas: np.ndarray
    etas: np.ndarray
    printed_smaller: np.ndarray
    printed_larger: np.ndarray
    corrected_smaller: np.ndarray
    corrected_larger: np.ndarray

    def printed_limit_gap(self) -> np.ndarray:
        """|larger root - (eta + 1)/2| per (alpha, eta)."""
        return np.abs(self.printed_larger - 0.5 * (self.etas[None, :] + 1.0))


def limit_sweep(etas: Sequence[float], alphas: Sequence[float]) -> LimitSweep:
    """Evaluate both quadratics over a grid of (alpha, eta)."""
    etas = np.asarray(etas, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    shape = (len(alphas), len(etas))
    out = {key: np.zeros(shape) for key in ("ps", "pl", "cs", "cl")}
    for i, alpha in enumerate(alphas):
        for j, eta in enumerate(etas):
            roots = lambda_roots(alpha, eta)
            printed = sorted(roots.printed.roots, key=abs)
            corrected = sorted(roots.corrected.roots, key=abs)
            out["ps"][i, j] = abs(printed[0])
            out["pl"][i, j] = abs(printed[1])
            out["cs"][i, j] = abs(corrected[0])
            out["cl"][i, j] = abs(corrected[1])
    return LimitSweep(
        alphas=alphas,
        etas=etas,
        printed_smaller=out["ps"],
        printed_larger=out["pl"],
        corrected_smaller=out["cs"],
        corrected_larger=out["cl"],
    )
