"""
Sweep case files

    # comment
    solver = gmres          <- before the first [case]: defaults for every case
    tol = 1e-12

    [case]
    p = 16
    precond = R

    [case]
    p = 16
    precond = RSS
    alpha = 0.01

Unknown keys are rejected with their line number.
"""

from pathlib import Path
from typing import Any, Callable, Dict, List, Union

from src.bench.cases import CaseConfig
from src.errors import ConfigLoadError, InvalidConfigurationError, UnknownConfigKeyError


def _text(value: str) -> str:
    return value


FIELD_TYPES: Dict[str, Callable[[str], Any]] = {
    "p": int,
    "nu": float,
    "variant": _text,
    "solver": _text,
    "precond": _text,
    "alpha": float,
    "tol": float,
    "maxit": int,
    "inner_tol": float,
    "inner_maxit": int,
    "shat_mode": _text,
    "droptol": float,
    "seed": int,
    "exact_solution": _text,
}

SECTION = "[case]"


def _unquote(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    return value


def _convert(key: str, raw: str, line: int) -> Any:
    try:
        return FIELD_TYPES[key](_unquote(raw))
    except ValueError:
        raise InvalidConfigurationError(key, raw, f"line {line}: expected {FIELD_TYPES[key].__name__.strip('_')}")


def parse_case_text(text: str) -> List[CaseConfig]:
    """
    Parse case file text into configs.

    Raises:
        UnknownConfigKeyError: key outside the CaseConfig fields
        InvalidConfigurationError: malformed line, bad value or missing p
    """
    defaults: Dict[str, Any] = {}
    sections: List[Dict[str, Any]] = []
    current = defaults

    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line.lower() != SECTION:
                raise InvalidConfigurationError("section", line, f"line {number}: only {SECTION} sections are allowed")
            current = {"_line": number}
            sections.append(current)
            continue
        if "=" not in line:
            raise InvalidConfigurationError("line", raw_line, f"line {number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in FIELD_TYPES:
            raise UnknownConfigKeyError(key, number)
        current[key] = _convert(key, value, number)

    configs = []
    for section in sections:
        start = section.pop("_line")
        fields = {**defaults, **section}
        if "p" not in fields:
            raise InvalidConfigurationError("p", None, f"case starting at line {start} has no grid size")
        configs.append(CaseConfig(**fields))
    return configs


def load_case_file(path: Union[str, Path]) -> List[CaseConfig]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigLoadError(str(path), str(e))
    return parse_case_text(text)
