"""Spectrum CSV: header re,im,class,residual; values in %.17g; empty residual when unverified."""

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

from src.errors import InvalidConfigurationError, ReportWriteError
from src.spectral.spectrum import EigenClass, SpectrumReport


HEADER = ["re", "im", "class", "residual"]


@dataclass(frozen=True)
class SpectrumRow:
    re: float
    im: float
    eigen_class: EigenClass
    residual: Optional[float]

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dump_spectrum_csv(report: SpectrumReport, also_raw_operator_spectrum: bool = False) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(HEADER)
    for entry in report.entries:
        writer.writerow([
            _fmt(entry.value.real),
            _fmt(entry.value.imag),
            entry.eigen_class.value,
            "" if entry.residual is None else _fmt(entry.residual),
        ])
    if also_raw_operator_spectrum and report.raw_spectrum is not None:
        for value in report.raw_spectrum:
            writer.writerow([_fmt(value), _fmt(0.0), EigenClass.RAW.value, ""])
    return buffer.getvalue()


def write_spectrum_csv(
    report: SpectrumReport,
    path: Union[str, Path],
    also_raw_operator_spectrum: bool = False,
) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dump_spectrum_csv(report, also_raw_operator_spectrum), encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(str(path), str(e))
    return path


def parse_spectrum_csv(text: str) -> List[SpectrumRow]:
    """Inverse of dump_spectrum_csv."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != HEADER:
        raise InvalidConfigurationError("spectrum csv", rows[0] if rows else "", f"header must be {','.join(HEADER)}")
    parsed = []
    for row in rows[1:]:
        if not row:
            continue
        re, im, cls, residual = row
        parsed.append(SpectrumRow(
            re=float(re),
            im=float(im),
            eigen_class=EigenClass(cls),
            residual=float(residual) if residual else None,
        ))
    return parsed
