"""
Structured logging for saddlebench

One JSON object per record. Records emitted while a benchmark case runs carry
that case's context (case_id, p, nu, solver, precond), so a sweep log can be
split per case afterwards. Library modules log solver convergence at DEBUG and
ICT shift rescues at WARNING; the bench logs case start and finish at INFO.
"""

import json
import logging
import threading
import time
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, Optional


LOGGER_NAME = "saddlebench"


class JSONFormatter(logging.Formatter):
    """Render a LogRecord as a single JSON line."""

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }
        for key in ('context', 'fields'):
            value = getattr(record, key, None)
            if value:
                payload[key] = value
        if hasattr(record, 'duration'):
            payload['duration_ms'] = record.duration
        if record.exc_info:
            payload['exception'] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


class BenchLogger:
    """
    Wrapper around a stdlib logger with per-thread case context.

    Console output goes to stderr (JSON or plain text); with a log_dir every
    record at DEBUG and above is also appended to saddlebench_YYYYMMDD.log as
    JSON.
    """

    def __init__(
        self,
        name: str = LOGGER_NAME,
        log_level: str = "INFO",
        log_dir: Optional[Path] = None,
        json_format: bool = True
    ):
        level = getattr(logging, log_level.upper())
        self.logger = logging.getLogger(name)
        self.logger.setLevel(level)
        self.logger.handlers.clear()
        self.logger.propagate = False

        console = logging.StreamHandler()
        console.setLevel(level)
        console.setFormatter(
            JSONFormatter() if json_format
            else logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s')
        )
        self.logger.addHandler(console)

        if log_dir:
            log_dir = Path(log_dir)
            log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_dir / f"saddlebench_{datetime.now():%Y%m%d}.log")
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(JSONFormatter())
            self.logger.addHandler(file_handler)

        self._local = threading.local()

    # ------------------------------------------------------------------
    # Context
    # ------------------------------------------------------------------

    @property
    def _context(self) -> Dict[str, Any]:
        # per thread: parallel sweep workers each log their own case
        if not hasattr(self._local, "context"):
            self._local.context = {}
        return self._local.context

    @_context.setter
    def _context(self, value: Dict[str, Any]):
        self._local.context = value

    def set_context(self, **kwargs):
        self._context.update(kwargs)

    def clear_context(self):
        self._context.clear()

    @contextmanager
    def case_context(self, case_id: str, **fields) -> Iterator[None]:
        """
        Scope records to one benchmark case; the previous context is restored on exit.

        Example:
            with logger.case_context("p16-nu1-gmres-R", p=16, precond="R"):
                logger.info("case started")
        """
        saved = self._context.copy()
        self._context.update(case_id=case_id, **fields)
        try:
            yield
        finally:
            self._context = saved

    # ------------------------------------------------------------------
    # Records
    # ------------------------------------------------------------------

    def _log(self, level: int, message: str, fields: Dict[str, Any],
             exc_info: bool = False, duration: Optional[float] = None):
        extra: Dict[str, Any] = {'context': self._context.copy(), 'fields': fields}
        if duration is not None:
            extra['duration'] = duration
        self.logger.log(level, message, exc_info=exc_info, extra=extra)

    def is_enabled_for(self, level: int) -> bool:
        return self.logger.isEnabledFor(level)

    def debug(self, message: str, **fields):
        self._log(logging.DEBUG, message, fields)

    def info(self, message: str, **fields):
        self._log(logging.INFO, message, fields)

    def warning(self, message: str, **fields):
        self._log(logging.WARNING, message, fields)

    def error(self, message: str, exc_info: bool = False, **fields):
        self._log(logging.ERROR, message, fields, exc_info=exc_info)

    def critical(self, message: str, exc_info: bool = True, **fields):
        self._log(logging.CRITICAL, message, fields, exc_info=exc_info)

    @contextmanager
    def performance_log(self, operation: str, level: int = logging.DEBUG) -> Iterator[None]:
        """Log 'Starting: op' and 'Completed: op' with duration_ms around a block."""
        start = time.perf_counter()
        self._log(level, f"Starting: {operation}", {})
        try:
            yield
        finally:
            self._log(level, f"Completed: {operation}", {},
                      duration=(time.perf_counter() - start) * 1000)


_global_logger: Optional[BenchLogger] = None


def get_logger(
    name: str = LOGGER_NAME,
    log_level: str = "WARNING",
    log_dir: Optional[Path] = None
) -> BenchLogger:
    """Process-wide logger; the arguments only apply when it is first created."""
    global _global_logger
    if _global_logger is None:
        _global_logger = BenchLogger(name=name, log_level=log_level, log_dir=log_dir)
    return _global_logger


def configure_logging(
    log_level: str = "INFO",
    log_dir: Optional[Path] = None,
    json_format: bool = True
) -> BenchLogger:
    """Replace the process-wide logger (the CLI calls this once settings are loaded)."""
    global _global_logger
    _global_logger = BenchLogger(
        name=LOGGER_NAME,
        log_level=log_level,
        log_dir=log_dir,
        json_format=json_format
    )
    return _global_logger
