"""
saddlebench CLI - Command line interface.

Commands:
- run: one benchmark case
- sweep: every [case] of a case file
- table: one table family (nu, solver) over a grid
- spectrum: enumerate and verify the eigenvalues of P_R^{-1} A_minus

Exit codes: 0 all converged, 2 something did not converge or failed,
3 configuration error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src.bench.case_file import load_case_file
from src.bench.cases import CaseConfig, CaseResult, ExactSolution, SolverKind
from src.bench.runner import run_case, run_sweep, table_configs
from src.bench.tables import emit_table
from src.errors import InvalidConfigurationError, ReportWriteError, SaddleBenchError
from src.infrastructure.config import BenchSettings, load_settings
from src.infrastructure.logging import configure_logging
from src.infrastructure.monitoring import get_monitor
from src.precond.preconditioners import PreconditionerKind
from src.precond.shat import ShatMode
from src.problems.example1 import Variant, build_example1


EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_CONFIG = 3


# ============================================================================
# Exceptions
# ============================================================================

class CLIError(Exception):
    """Raised for usage errors (bad flags, missing arguments)."""
    pass


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors by exiting with 2; route them to the configuration exit code."""

    def error(self, message: str):
        raise CLIError(f"{self.prog}: {message}")


# ============================================================================
# Output formatting
# ============================================================================

class CLIFormatter:
    """Plain text helpers for terminal output."""

    def success(self, message: str) -> str:
        return f"✓ {message}"

    def warning(self, message: str) -> str:
        return f"⚠ WARNING: {message}"

    def info(self, message: str) -> str:
        return f"ℹ {message}"

    def table(self, headers: List[str], rows: List[List[Any]]) -> str:
        col_widths = [len(h) for h in headers]
        for row in rows:
            for i, cell in enumerate(row):
                col_widths[i] = max(col_widths[i], len(str(cell)))

        header_line = " | ".join(h.ljust(col_widths[i]) for i, h in enumerate(headers))
        lines = [header_line, "-" * len(header_line)]
        for row in rows:
            lines.append(" | ".join(str(cell).ljust(col_widths[i]) for i, cell in enumerate(row)))
        return "\n".join(lines)

    def case_summary(self, result: CaseResult) -> str:
        row = result.to_row()
        fmt = lambda x: "-" if x is None else f"{x:.3e}"
        return self.table(
            ["p", "nu", "solver", "precond", "alpha", "Iter", "Iter_pcg", "CPU", "Setup", "Err", "Res", "status"],
            [[row.p, f"{row.nu:g}", row.solver, row.precond,
              "-" if row.alpha is None else f"{row.alpha:g}",
              row.iter, row.iter_pcg, f"{row.cpu_s:.3f}", f"{result.setup_seconds:.3f}",
              fmt(row.err), fmt(row.res), row.status]],
        )


# ============================================================================
# Parser
# ============================================================================

def _add_inner_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--inner-tol", type=float, default=None,
                        help="inner PCG tolerance (default: settings inner_tol, tightened for gmres/minres)")
    parser.add_argument("--inner-maxit", type=int, default=None,
                        help="inner PCG iteration limit (default: settings inner_maxit, scaled when tightened)")


def _add_case_flags(parser: argparse.ArgumentParser, defaults: BenchSettings):
    parser.add_argument("--p", type=int, required=True, help="grid parameter (N = 4 p^2)")
    parser.add_argument("--nu", type=float, default=1.0)
    parser.add_argument("--variant", choices=[v.value for v in Variant], default=None)
    parser.add_argument("--solver", choices=[s.value for s in SolverKind], default=SolverKind.GMRES.value)
    parser.add_argument("--precond", choices=[k.value for k in PreconditionerKind], default=PreconditionerKind.R.value)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--maxit", type=int, default=defaults.outer_maxit)
    _add_inner_flags(parser)
    parser.add_argument("--shat-mode", choices=[m.value for m in ShatMode], default=ShatMode.FULL.value)
    parser.add_argument("--droptol", type=float, default=defaults.droptol)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--exact-solution", choices=[e.value for e in ExactSolution], default=ExactSolution.ONES.value)


def build_parser(defaults: Optional[BenchSettings] = None) -> argparse.ArgumentParser:
    defaults = defaults or BenchSettings()
    parser = _Parser(prog="saddlebench", description="Block preconditioners for double saddle-point systems")
    parser.add_argument("--settings", type=Path, default=None, help="settings file (default: ./saddlebench.yaml)")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR or CRITICAL")
    parser.add_argument("--no-color", action="store_true", help="plain error output")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="run one benchmark case")
    _add_case_flags(run, defaults)
    run.add_argument("--format", choices=["text", "json", "csv", "markdown"], default="text")
    run.add_argument("--out", type=Path, default=None, help="relative paths land under output_dir")
    run.add_argument("--verbose", action="store_true", help="print setup/solve monitoring stats")

    sweep = sub.add_parser("sweep", help="run every case of a case file")
    sweep.add_argument("--config", type=Path, required=True, help="case file with [case] sections")
    sweep.add_argument("--format", choices=["csv", "markdown"], default="csv")
    sweep.add_argument("--out", type=Path, default=None, help="relative paths land under output_dir")
    sweep.add_argument("--parallel", action="store_true", default=None)

    table = sub.add_parser("table", help="regenerate one table family over a grid")
    table.add_argument("--nu", type=float, default=1.0)
    table.add_argument("--solver", choices=[s.value for s in SolverKind if s is not SolverKind.PCG],
                       default=SolverKind.GMRES.value)
    table.add_argument("--grid", type=int, nargs="+", default=None, help="grid sizes p")
    table.add_argument("--tol", type=float, default=None)
    _add_inner_flags(table)
    table.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    table.add_argument("--out", type=Path, default=None, help="relative paths land under output_dir")
    table.add_argument("--parallel", action="store_true", default=None)

    spectrum = sub.add_parser("spectrum", help="enumerate and verify the preconditioned spectrum")
    spectrum.add_argument("--p", type=int, required=True)
    spectrum.add_argument("--nu", type=float, default=1.0)
    spectrum.add_argument("--alpha", type=float, default=2.0)
    spectrum.add_argument("--out", type=Path, default=None, help="CSV dump (re,im,class,residual)")
    spectrum.add_argument("--raw", action="store_true", help="also dump the eigenvalues of A_plus")
    spectrum.add_argument("--format", choices=["text", "json"], default="text")
    return parser


# ============================================================================
# Main CLI Orchestrator
# ============================================================================

class CLI:
    """
    Parses arguments, dispatches to the command handlers and maps outcomes
    to exit codes.
    """

    def __init__(self):
        self.formatter = CLIFormatter()
        self.settings: Optional[BenchSettings] = None

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def cmd_run(self, args: argparse.Namespace) -> int:
        variant = args.variant or (Variant.PLUS.value if args.solver == SolverKind.MINRES.value else Variant.MINUS.value)
        config = CaseConfig(
            p=args.p,
            nu=args.nu,
            variant=variant,
            solver=args.solver,
            precond=args.precond,
            alpha=args.alpha,
            tol=args.tol,
            maxit=args.maxit,
            inner_tol=args.inner_tol,
            inner_maxit=args.inner_maxit,
            shat_mode=args.shat_mode,
            droptol=args.droptol,
            seed=args.seed,
            exact_solution=args.exact_solution,
        )
        result = run_case(config, self.settings)

        if args.format == "json":
            text = json.dumps(result.to_dict(), indent=2, default=str)
        elif args.format in ("csv", "markdown"):
            text = emit_table([result], args.format)
        else:
            text = self.formatter.case_summary(result)
        self._emit(text, args.out)

        if args.verbose and self.settings.enable_monitoring:
            breakdown = get_monitor().case_breakdown(result.config.case_id)
            print(self.formatter.table(
                ["phase", "wall ms"],
                [[phase, f"{ms:.1f}"] for phase, ms in breakdown.items()],
            ))
        return EXIT_OK if result.converged else EXIT_NOT_CONVERGED

    def cmd_sweep(self, args: argparse.Namespace) -> int:
        configs = load_case_file(args.config)
        if not configs:
            raise CLIError(f"{args.config} contains no [case] sections")
        for config in configs:
            config.check_compatible()
        results = run_sweep(configs, parallel=args.parallel, settings=self.settings)
        return self._report(results, args.format, args.out)

    def cmd_table(self, args: argparse.Namespace) -> int:
        grid = args.grid or list(self.settings.default_grid)
        overrides: Dict[str, Any] = dict(
            maxit=self.settings.outer_maxit,
            droptol=self.settings.droptol,
        )
        for name in ("tol", "inner_tol", "inner_maxit"):
            if getattr(args, name) is not None:
                overrides[name] = getattr(args, name)
        configs = table_configs(args.nu, args.solver, grid, **overrides)
        results = run_sweep(configs, parallel=args.parallel, settings=self.settings)
        return self._report(results, args.format, args.out)

    def cmd_spectrum(self, args: argparse.Namespace) -> int:
        from src.spectral.csv_io import write_spectrum_csv
        from src.spectral.spectrum import enumerate_and_verify_spectrum

        if not args.alpha > 0:
            raise InvalidConfigurationError("alpha", args.alpha, "must be positive")
        if not 2 <= args.p <= self.settings.spectral_max_p:
            raise InvalidConfigurationError(
                "p", args.p, f"spectral checks are dense; need 2 <= p <= {self.settings.spectral_max_p}"
            )
        if not args.nu > 0:
            raise InvalidConfigurationError("nu", args.nu, "must be positive")
        blocks = build_example1(args.p, args.nu)
        report = enumerate_and_verify_spectrum(
            blocks,
            args.alpha,
            include_raw_spectrum=args.raw,
            max_p=self.settings.spectral_max_p,
        )
        if args.out is not None:
            out = write_spectrum_csv(report, self._output_path(args.out), also_raw_operator_spectrum=args.raw)
            print(self.formatter.success(f"wrote {out}"), file=sys.stderr)

        summary = report.to_dict()
        if args.format == "json":
            print(json.dumps(summary, indent=2, default=str))
        else:
            mult = summary["multiplicities"]
            print(self.formatter.table(
                ["p", "nu", "alpha", "N", "one", "half", "quad-root", "null(C)", "eta_min", "eta_max", "max residual"],
                [[args.p, f"{args.nu:g}", f"{args.alpha:g}", report.N, mult["one"], mult["half"],
                  mult["quad-root"], report.null_dim_C, f"{report.eta_min:.6g}", f"{report.eta_max:.6g}",
                  f"{report.max_residual():.2e}"]],
            ))
            if not report.interval.valid:
                print(self.formatter.info(f"printed interval not applicable: {report.interval.reason}"))
            if report.half_discrepancy:
                print(self.formatter.info(
                    f"lambda = 1/2 has multiplicity {mult['half']} (dim null(C)), not m = {report.m}"
                ))
        return EXIT_OK if report.all_verified else EXIT_NOT_CONVERGED

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _report(self, results: Sequence[CaseResult], fmt: str, out: Optional[Path]) -> int:
        self._emit(emit_table(results, fmt), out)
        failed = [r for r in results if not r.converged]
        if failed:
            print(self.formatter.warning(f"{len(failed)} of {len(results)} cases did not converge"), file=sys.stderr)
            return EXIT_NOT_CONVERGED
        return EXIT_OK

    def _output_path(self, out: Path) -> Path:
        """Relative --out paths resolve under settings.output_dir."""
        out = Path(out)
        if out.is_absolute():
            return out
        return Path(self.settings.output_dir) / out

    def _emit(self, text: str, out: Optional[Path]):
        if out is None:
            print(text, end="" if text.endswith("\n") else "\n")
            return
        out = self._output_path(out)
        try:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
        except OSError as e:
            raise ReportWriteError(str(out), str(e))
        print(self.formatter.success(f"wrote {out}"))

    def execute(self, args: argparse.Namespace) -> int:
        handlers = {
            "run": self.cmd_run,
            "sweep": self.cmd_sweep,
            "table": self.cmd_table,
            "spectrum": self.cmd_spectrum,
        }
        if args.command not in handlers:
            raise CLIError("No command specified. Use: run, sweep, table, spectrum")
        return handlers[args.command](args)

    def run(self, argv: List[str]) -> int:
        """
        Main entry point for CLI.

        Args:
            argv: Command line arguments (including program name)

        Returns:
            Exit code
        """
        use_color = "--no-color" not in argv and sys.stderr.isatty()
        from src.cli.ui.error_display import ErrorFormatter
        fmt = ErrorFormatter(use_color=use_color)

        try:
            settings_path = _settings_path(argv[1:])
            self.settings = load_settings(settings_path)
            args = build_parser(self.settings).parse_args(argv[1:])
            configure_logging(
                log_level=args.log_level or self.settings.log_level,
                log_dir=self.settings.log_dir,
                json_format=self.settings.log_json_format,
            )
            return self.execute(args)

        except CLIError as e:
            print(f"usage error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        except SaddleBenchError as e:
            print(fmt.format_error(e), file=sys.stderr)
            return EXIT_CONFIG if e.is_configuration_error else EXIT_NOT_CONVERGED
        except Exception as e:
            print(fmt.format_unexpected_error(e), file=sys.stderr)
            return EXIT_NOT_CONVERGED


def _settings_path(argv: Sequence[str]) -> Optional[Path]:
    """--settings must be known before the parser is built (its defaults come from the settings)."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--settings", type=Path, default=None)
    known, _ = pre.parse_known_args(argv)
    return known.settings


def main():
    """Entry point for the saddlebench command."""
    cli = CLI()
    sys.exit(cli.run(sys.argv))


if __name__ == "__main__":
    main()
