"""
Error display for the saddlebench CLI

Configuration errors (exit 3) and numerical failures (exit 2) are told
apart in the heading and the closing hint; the case id is shown when the
error was raised for a specific benchmark case.

    saddlebench: configuration error [CONFIG_003]
      Incompatible case: solver=minres, precond=RD, variant=minus
        case     p16-nu1-minres-RD
        solver   minres
        reason   MINRES needs the symmetric variant (plus)
      hint: MINRES needs the symmetric variant (plus)
      nothing was solved; fix the case or settings and re-run
"""

import sys
from typing import List, TYPE_CHECKING

if TYPE_CHECKING:
    from src.errors import SaddleBenchError


_RESET = "\033[0m"
_BOLD = "\033[1m"
_DIM = "\033[2m"
_RED = "\033[91m"
_YELLOW = "\033[93m"

# (heading, closing hint, colour) per error family
_CONFIGURATION = ("configuration error", "nothing was solved; fix the case or settings and re-run", _YELLOW)
_OUTPUT = ("could not write results", "check --out and output_dir (SADDLEBENCH_OUTPUT_DIR)", _YELLOW)
_NUMERICAL = ("numerical failure", "re-run with --log-level DEBUG to see per-solve convergence records", _RED)


def _family(error: "SaddleBenchError"):
    if error.is_configuration_error:
        return _CONFIGURATION
    if error.code.startswith("REPORT_"):
        return _OUTPUT
    return _NUMERICAL


class ErrorFormatter:
    """Renders saddlebench errors for stderr; use_color=False for logs and CI."""

    INDENT = "  "

    def __init__(self, use_color: bool = True):
        self.use_color = use_color

    def format_error(self, error: "SaddleBenchError") -> str:
        info = error.error_details
        heading, closing, color = _family(error)

        lines: List[str] = [
            self._paint(f"saddlebench: {heading} [{info.code}]", color + _BOLD),
            f"{self.INDENT}{info.message}",
        ]
        rows = {}
        case_id = info.context.get("case_id") or info.details.get("case_id")
        if case_id:
            rows["case"] = case_id
        rows.update((k, v) for k, v in info.details.items() if k != "case_id")
        width = max((len(k) for k in rows), default=0)
        for key, value in rows.items():
            label = key.replace("_", " ").ljust(width)
            lines.append(f"{self.INDENT * 2}{self._paint(label, _DIM)}   {value}")

        if info.suggestion:
            for hint in info.suggestion.splitlines():
                if hint.strip():
                    lines.append(f"{self.INDENT}hint: {hint.strip()}")
        lines.append(f"{self.INDENT}{self._paint(closing, _DIM)}")
        return "\n".join(lines)

    def format_unexpected_error(self, error: Exception) -> str:
        message = str(error) or "(no message)"
        return "\n".join([
            self._paint("saddlebench: unexpected error", _RED + _BOLD),
            f"{self.INDENT}{type(error).__name__}: {message[:200]}",
            f"{self.INDENT}hint: re-run with --log-level DEBUG; the JSON log carries the traceback",
        ])

    def format(self, error: Exception) -> str:
        from src.errors import SaddleBenchError

        if isinstance(error, SaddleBenchError):
            return self.format_error(error)
        return self.format_unexpected_error(error)

    def _paint(self, text: str, style: str) -> str:
        return f"{style}{text}{_RESET}" if self.use_color else text


def format_error(error: Exception, use_color: bool = True) -> str:
    return ErrorFormatter(use_color=use_color).format(error)


def print_error(error: Exception, use_color: bool = True) -> None:
    print(format_error(error, use_color=use_color), file=sys.stderr)
