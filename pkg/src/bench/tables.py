"""
Result tables (CSV and markdown)

CSV carries one row per case with exact (%.17g) numerics so that it can
be parsed back; markdown mirrors the printed layout: one table per
(nu, solver), one row per grid size, one column group per preconditioner.
"""

import csv
import io
from collections import OrderedDict
from typing import List, Optional, Sequence

from src.bench.cases import CaseResult, TableRow
from src.errors import InvalidConfigurationError


CSV_HEADER = ["p", "nu", "solver", "precond", "alpha", "iter", "iter_pcg", "cpu_s", "err", "res", "status"]
TABLE_FORMATS = ("csv", "markdown")


def _exact(x: Optional[float]) -> str:
    return "" if x is None else format(float(x), ".17g")


def _short(x: Optional[float]) -> str:
    return "-" if x is None else format(float(x), ".2e")


def _csv(results: Sequence[CaseResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for result in results:
        row = result.to_row()
        writer.writerow([
            row.p,
            _exact(row.nu),
            row.solver,
            row.precond,
            _exact(row.alpha),
            row.iter,
            row.iter_pcg,
            _exact(row.cpu_s),
            _exact(row.err),
            _exact(row.res),
            row.status,
        ])
    return buffer.getvalue()


def _inner_note(plan: Optional[dict]) -> str:
    if not plan:
        return ""
    note = f"tol {plan['tol']:.0e}, maxit {plan['maxit']}"
    if plan.get("tightened"):
        note += " (tightened for a fixed preconditioner)"
    return note


def _markdown(results: Sequence[CaseResult]) -> str:
    groups: "OrderedDict[tuple, List[TableRow]]" = OrderedDict()
    inner_plans: "OrderedDict[tuple, List[str]]" = OrderedDict()
    for result in results:
        row = result.to_row()
        groups.setdefault((row.nu, row.solver), []).append(row)
        plans = inner_plans.setdefault((row.nu, row.solver), [])
        note = _inner_note(result.metadata.get("inner"))
        if note and note not in plans:
            plans.append(note)

    sections = []
    for (nu, solver), rows in groups.items():
        preconds = list(OrderedDict.fromkeys(r.precond for r in rows))
        by_cell = {(r.p, r.precond): r for r in rows}
        grid = sorted({r.p for r in rows})

        header = ["p"]
        for precond in preconds:
            header += [f"P_{precond} Iter", "Iter_pcg", "CPU", "Err", "Res"]
        lines = [
            f"### nu = {nu:g}, {solver}",
            "",
            "| " + " | ".join(header) + " |",
            "|" + "|".join("---" for _ in header) + "|",
        ]
        for p in grid:
            cells = [str(p)]
            for precond in preconds:
                row = by_cell.get((p, precond))
                if row is None:
                    cells += ["-"] * 5
                elif row.status.startswith("error"):
                    cells += ["error", "-", "-", "-", "-"]
                else:
                    iters = str(row.iter) if row.status == "converged" else f"{row.iter}†"
                    cells += [iters, str(row.iter_pcg), f"{row.cpu_s:.2f}", _short(row.err), _short(row.res)]
            lines.append("| " + " | ".join(cells) + " |")
        if inner_plans[(nu, solver)]:
            lines += ["", "inner PCG: " + "; ".join(inner_plans[(nu, solver)])]
        sections.append("\n".join(lines))

    if any(r.status == "maxit" for rows in groups.values() for r in rows):
        sections.append("† iteration limit reached")
    return "\n\n".join(sections) + ("\n" if sections else "")


def emit_table(results: Sequence[CaseResult], fmt: str = "csv") -> str:
    """Render results as csv or markdown."""
    if fmt == "csv":
        return _csv(results)
    if fmt == "markdown":
        return _markdown(results)
    raise InvalidConfigurationError("format", fmt, f"must be one of: {', '.join(TABLE_FORMATS)}")


def _optional_float(text: str) -> Optional[float]:
    return float(text) if text else None


def parse_table_csv(text: str) -> List[TableRow]:
    """Rows of a CSV produced by emit_table."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise InvalidConfigurationError(
            "results csv", reader.fieldnames, f"header must be {','.join(CSV_HEADER)}"
        )
    return [
        TableRow(
            p=int(record["p"]),
            nu=float(record["nu"]),
            solver=record["solver"],
            precond=record["precond"],
            alpha=_optional_float(record["alpha"]),
            iter=int(record["iter"]),
            iter_pcg=int(record["iter_pcg"]),
            cpu_s=float(record["cpu_s"]),
            err=_optional_float(record["err"]),
            res=float(record["res"]),
            status=record["status"],
        )
        for record in reader
    ]
