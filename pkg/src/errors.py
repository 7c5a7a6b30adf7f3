"""
saddlebench Error Catalog

Provides consistent, user-friendly error messages with:
- Unique error codes for debugging
- Clear, actionable suggestions
- Structured error details

Error Code Format: CATEGORY_NNN
Categories:
- SPARSE: Sparse storage and kernel errors
- DOMAIN: Parameter preconditions
- FACTOR: Factorization and dense eigensolver errors
- SOLVER: Krylov breakdowns
- PRECOND: Preconditioner application errors
- SPECTRAL: Spectral verification errors
- REPORT: Report and dump output errors
- CONFIG: Configuration and case-file errors
"""

from dataclasses import dataclass, field
from typing import Dict, Any, Optional, TYPE_CHECKING
from enum import Enum

if TYPE_CHECKING:
    from src.solvers.krylov import SolveReport


class ErrorSeverity(Enum):
    """Error severity levels"""
    INFO = "info"  # Informational, non-blocking
    WARNING = "warning"  # Potential issue, continues execution
    ERROR = "error"  # Blocking error, operation failed
    CRITICAL = "critical"  # Numerical failure the caller cannot recover from


@dataclass
class ErrorDetails:
    """Structured error information"""
    code: str
    message: str
    severity: ErrorSeverity = ErrorSeverity.ERROR
    details: Dict[str, Any] = field(default_factory=dict)
    suggestion: Optional[str] = None
    context: Dict[str, Any] = field(default_factory=dict)


class SaddleBenchError(Exception):
    """
    Base exception for all saddlebench errors.

    Provides structured error information with:
    - Unique error codes
    - User-friendly messages
    - Actionable suggestions
    """

    def __init__(
        self,
        code: str,
        message: str,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        details: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None
    ):
        self.error_details = ErrorDetails(
            code=code,
            message=message,
            severity=severity,
            details=details or {},
            suggestion=suggestion,
            context=context or {}
        )
        super().__init__(self._format_message())

    @property
    def code(self) -> str:
        return self.error_details.code

    @property
    def is_configuration_error(self) -> bool:
        """True for errors that map to the CLI configuration exit code"""
        return self.error_details.code.startswith("CONFIG_")

    def _format_message(self) -> str:
        """Format error message for display"""
        parts = [
            f"[{self.error_details.code}] {self.error_details.message}"
        ]

        if self.error_details.details:
            parts.append("\nDetails:")
            for key, value in self.error_details.details.items():
                parts.append(f"  {key}: {value}")

        if self.error_details.suggestion:
            parts.append(f"\nSuggestion: {self.error_details.suggestion}")

        return "\n".join(parts)

    def short_message(self) -> str:
        """One-line form used in CSV status cells"""
        return f"{self.error_details.code} {self.error_details.message}"

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "code": self.error_details.code,
            "message": self.error_details.message,
            "severity": self.error_details.severity.value,
            "details": self.error_details.details,
            "suggestion": self.error_details.suggestion,
            "context": self.error_details.context
        }

    def format_for_cli(self, use_color: bool = True) -> str:
        """
        Return a colour-coded string suitable for terminal display.

        Delegates to :class:`src.cli.ui.error_display.ErrorFormatter` so the
        presentation layer stays outside the error model.
        """
        try:
            from src.cli.ui.error_display import ErrorFormatter
            return ErrorFormatter(use_color=use_color).format_error(self)
        except Exception:
            # Fallback to plain format if display module unavailable
            return self._format_message()


# ============================================================================
# Sparse Storage Errors (SPARSE_xxx)
# ============================================================================

class StructuralError(SaddleBenchError):
    """Raised when a triplet or index lies outside the matrix shape"""

    def __init__(self, row: int, col: int, nrows: int, ncols: int):
        super().__init__(
            code="SPARSE_001",
            message=f"Index ({row}, {col}) out of range for {nrows}x{ncols} matrix",
            details={"row": row, "col": col, "nrows": nrows, "ncols": ncols},
            suggestion="Check the row and column indices passed to the builder"
        )


class DimensionMismatchError(SaddleBenchError):
    """Raised when operand shapes do not conform"""

    def __init__(self, operation: str, expected: Any, actual: Any):
        super().__init__(
            code="SPARSE_002",
            message=f"Dimension mismatch in {operation}",
            details={"operation": operation, "expected": expected, "actual": actual},
            suggestion="Make the vector length match the operator dimension"
        )


class NonFiniteError(SaddleBenchError):
    """Raised when NaN or Inf would escape a public operation"""

    def __init__(self, operation: str):
        super().__init__(
            code="SPARSE_003",
            message=f"Non-finite values produced by {operation}",
            details={"operation": operation},
            severity=ErrorSeverity.CRITICAL,
            suggestion="Check the input for NaN/Inf or an overflowing scale"
        )


# ============================================================================
# Parameter Preconditions (DOMAIN_xxx)
# ============================================================================

class DomainError(SaddleBenchError):
    """Raised when a scalar parameter violates its documented range"""

    def __init__(self, parameter: str, value: Any, requirement: str):
        super().__init__(
            code="DOMAIN_001",
            message=f"Parameter '{parameter}' out of range: {value}",
            details={"parameter": parameter, "value": value, "requirement": requirement},
            suggestion=f"'{parameter}' must satisfy: {requirement}"
        )


# ============================================================================
# Factorization Errors (FACTOR_xxx)
# ============================================================================

class NotPositiveDefiniteError(SaddleBenchError):
    """Raised by Cholesky when a non-positive pivot is met"""

    def __init__(self, pivot: int, matrix: str = "matrix"):
        self.pivot = pivot
        super().__init__(
            code="FACTOR_001",
            message=f"{matrix} is not positive definite (pivot {pivot})",
            details={"pivot": pivot, "matrix": matrix},
            suggestion="The leading principal minor ending at this pivot is not positive"
        )


class NotSymmetricError(SaddleBenchError):
    """Raised when a symmetric input is required"""

    def __init__(self, asymmetry: float, tolerance: float):
        super().__init__(
            code="FACTOR_002",
            message="Matrix is not symmetric",
            details={"relative_asymmetry": asymmetry, "tolerance": tolerance},
            suggestion="Symmetrize the input as (M + M^T)/2 if the asymmetry is rounding"
        )


class IctBreakdownError(SaddleBenchError):
    """Raised when incomplete Cholesky breaks down even after diagonal shifting"""

    def __init__(self, pivot: int, last_shift: float):
        self.pivot = pivot
        super().__init__(
            code="FACTOR_003",
            message=f"Incomplete Cholesky breakdown at pivot {pivot}",
            details={"pivot": pivot, "last_shift": last_shift},
            severity=ErrorSeverity.CRITICAL,
            suggestion="Reduce the drop tolerance or check that the matrix is SPD"
        )


class EigenConvergenceError(SaddleBenchError):
    """Raised when the cyclic Jacobi sweep limit is exhausted"""

    def __init__(self, sweeps: int, off_norm: float):
        super().__init__(
            code="FACTOR_004",
            message=f"Jacobi eigensolver did not converge in {sweeps} sweeps",
            details={"sweeps": sweeps, "off_diagonal_norm": off_norm},
            suggestion="Increase max_sweeps or loosen the tolerance"
        )


# ============================================================================
# Krylov Solver Errors (SOLVER_xxx)
# ============================================================================

class IndefiniteOperatorError(SaddleBenchError):
    """Raised by CG when the curvature p^T A p is not positive"""

    def __init__(self, solver: str, iteration: int, curvature: float):
        self.iteration = iteration
        super().__init__(
            code="SOLVER_001",
            message=f"{solver}: operator is not positive definite at iteration {iteration}",
            details={"solver": solver, "iteration": iteration, "curvature": curvature},
            suggestion="Use MINRES for symmetric indefinite operators"
        )


class IndefinitePreconditionerError(SaddleBenchError):
    """Raised when a preconditioner that must be SPD yields a negative inner product"""

    def __init__(self, solver: str, iteration: int, value: float):
        self.iteration = iteration
        super().__init__(
            code="SOLVER_002",
            message=f"{solver}: preconditioner is indefinite at iteration {iteration}",
            details={"solver": solver, "iteration": iteration, "inner_product": value},
            suggestion="MINRES needs a symmetric positive definite preconditioner (P_RD or P_BD)"
        )


# ============================================================================
# Preconditioner Errors (PRECOND_xxx)
# ============================================================================

class InnerSolveError(SaddleBenchError):
    """Raised when an inner solve inside a preconditioner application does not converge"""

    def __init__(self, stage: str, report: "SolveReport"):
        self.report = report
        super().__init__(
            code="PRECOND_001",
            message=f"Inner solve '{stage}' did not converge",
            details={
                "stage": stage,
                "iterations": report.outer_iters,
                "final_residual": report.final_estimate,
            },
            suggestion="Raise inner_maxit or loosen inner_tol"
        )


class PreconditionerKindError(SaddleBenchError):
    """Raised when a state is applied with the wrong application routine"""

    def __init__(self, expected: str, actual: str):
        super().__init__(
            code="PRECOND_002",
            message=f"Preconditioner state of kind {actual} cannot be applied as {expected}",
            details={"expected": expected, "actual": actual},
            suggestion="Use apply_preconditioner to dispatch on the state kind"
        )


# ============================================================================
# Spectral Verification Errors (SPECTRAL_xxx)
# ============================================================================

class DenseGuardError(SaddleBenchError):
    """Raised when a dense spectral computation is requested beyond the size guard"""

    def __init__(self, size: int, limit: int, what: str = "p"):
        super().__init__(
            code="SPECTRAL_001",
            message=f"Dense computation refused: {what}={size} exceeds limit {limit}",
            details={what: size, "limit": limit},
            suggestion="Spectral verification is dense; use a smaller grid"
        )


class PoleError(SaddleBenchError):
    """Raised when the eta relation is evaluated at its pole"""

    def __init__(self, alpha: float):
        super().__init__(
            code="SPECTRAL_002",
            message="eta(lambda) has a pole at lambda = 1",
            details={"alpha": alpha, "lambda": 1.0},
            suggestion="lambda = 1 belongs to the first eigenvalue class; do not map it to eta"
        )


class SchurAsymmetryError(SaddleBenchError):
    """Raised when a computed Schur complement is too far from symmetric"""

    def __init__(self, name: str, asymmetry: float, tolerance: float):
        super().__init__(
            code="SPECTRAL_003",
            message=f"Schur complement {name} is not symmetric",
            details={"matrix": name, "relative_asymmetry": asymmetry, "tolerance": tolerance},
            severity=ErrorSeverity.CRITICAL,
            suggestion="The leading block is likely too ill-conditioned for dense elimination"
        )


# ============================================================================
# Report Output Errors (REPORT_xxx)
# ============================================================================

class ReportWriteError(SaddleBenchError):
    """Raised when a CSV dump or table cannot be written"""

    def __init__(self, path: str, reason: str):
        super().__init__(
            code="REPORT_001",
            message=f"Failed to write report to {path}",
            details={"path": path, "reason": reason},
            suggestion="Check that the output directory exists and is writable"
        )


# ============================================================================
# Configuration Errors (CONFIG_xxx)
# ============================================================================

class ConfigLoadError(SaddleBenchError):
    """Raised when a settings or case file cannot be read"""

    def __init__(self, file_path: str, reason: str):
        super().__init__(
            code="CONFIG_001",
            message="Failed to load configuration file",
            details={
                "file_path": file_path,
                "reason": reason
            },
            suggestion="Check the file path and syntax"
        )


class InvalidConfigurationError(SaddleBenchError):
    """Raised when configuration is invalid"""

    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(
            code="CONFIG_002",
            message=f"Invalid configuration: {field}",
            details={
                "field": field,
                "value": str(value),
                "reason": reason
            },
            suggestion=f"Fix '{field}' in configuration. {reason}"
        )


class IncompatibleCaseError(SaddleBenchError):
    """Raised when the solver, preconditioner and variant cannot be combined"""

    def __init__(self, solver: str, precond: str, variant: str, reason: str, case_id: Optional[str] = None):
        super().__init__(
            code="CONFIG_003",
            message=f"Incompatible case: solver={solver}, precond={precond}, variant={variant}",
            details={
                "solver": solver,
                "precond": precond,
                "variant": variant,
                "reason": reason
            },
            suggestion=reason,
            context={"case_id": case_id} if case_id else None
        )


class UnknownConfigKeyError(SaddleBenchError):
    """Raised when a case file names a key that CaseConfig does not have"""

    def __init__(self, key: str, line: int):
        super().__init__(
            code="CONFIG_004",
            message=f"Unknown configuration key '{key}'",
            details={"key": key, "line": line},
            suggestion="Keys must be CaseConfig field names (p, nu, solver, precond, ...)"
        )


# ============================================================================
# Error Catalog Registry
# ============================================================================

ERROR_CATALOG = {
    # Sparse storage errors
    "SPARSE_001": "Index out of range",
    "SPARSE_002": "Dimension mismatch",
    "SPARSE_003": "Non-finite result",

    # Parameter preconditions
    "DOMAIN_001": "Parameter out of range",

    # Factorization errors
    "FACTOR_001": "Not positive definite",
    "FACTOR_002": "Not symmetric",
    "FACTOR_003": "Incomplete Cholesky breakdown",
    "FACTOR_004": "Jacobi eigensolver did not converge",

    # Krylov errors
    "SOLVER_001": "Indefinite operator",
    "SOLVER_002": "Indefinite preconditioner",

    # Preconditioner errors
    "PRECOND_001": "Inner solve did not converge",
    "PRECOND_002": "Wrong preconditioner kind",

    # Spectral errors
    "SPECTRAL_001": "Dense size guard exceeded",
    "SPECTRAL_002": "Pole of the eta relation",
    "SPECTRAL_003": "Asymmetric Schur complement",

    # Report errors
    "REPORT_001": "Report write failed",

    # Config errors
    "CONFIG_001": "Configuration load failed",
    "CONFIG_002": "Invalid configuration",
    "CONFIG_003": "Incompatible case",
    "CONFIG_004": "Unknown configuration key",
}


def get_error_description(code: str) -> str:
    """Get short description for error code"""
    return ERROR_CATALOG.get(code, "Unknown error")


def list_all_errors() -> Dict[str, str]:
    """List all error codes and descriptions"""
    return ERROR_CATALOG.copy()
