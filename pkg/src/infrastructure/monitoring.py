"""
Phase monitoring for benchmark cases

Each case runs two phases, setup (problem build, S_hat, ICT) and solve
(the outer Krylov iteration). PhaseMonitor records wall time, process CPU
time and resident memory for every phase of every case so that setup cost
can be reported separately from the CPU column of the tables.
"""

import os
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

import psutil


SETUP = "setup"
SOLVE = "solve"

_MB = 1024 * 1024


@dataclass(frozen=True)
class PhaseSample:
    """One timed phase of one case."""
    phase: str
    wall_ms: float
    cpu_ms: float
    rss_delta_mb: float
    rss_mb: float
    case_id: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    timestamp: datetime = field(default_factory=datetime.now)


class PhaseMonitor:
    """
    Thread-safe recorder of PhaseSample entries.

    CPU time is process-wide (user + system), so under a parallel sweep it
    includes the work of concurrent cases; wall time is per phase.
    """

    def __init__(self):
        self._samples: List[PhaseSample] = []
        self._process = psutil.Process(os.getpid())
        self._lock = threading.Lock()

    def _cpu_seconds(self) -> float:
        times = self._process.cpu_times()
        return times.user + times.system

    @contextmanager
    def track_phase(self, phase: str, case_id: Optional[str] = None, **metadata):
        """
        Time one phase; the sample is recorded even if the phase raises.

        Example:
            with monitor.track_phase(SOLVE, case_id="p16-nu1-gmres-R", p=16):
                x, report = gmres(...)
        """
        rss_start = self._process.memory_info().rss
        cpu_start = self._cpu_seconds()
        wall_start = time.perf_counter()
        try:
            yield
        finally:
            wall_ms = (time.perf_counter() - wall_start) * 1000
            rss_end = self._process.memory_info().rss
            sample = PhaseSample(
                phase=phase,
                wall_ms=wall_ms,
                cpu_ms=(self._cpu_seconds() - cpu_start) * 1000,
                rss_delta_mb=(rss_end - rss_start) / _MB,
                rss_mb=rss_end / _MB,
                case_id=case_id,
                metadata=dict(metadata),
            )
            with self._lock:
                self._samples.append(sample)

    def samples(
        self,
        phase: Optional[str] = None,
        case_id: Optional[str] = None,
        limit: Optional[int] = None,
    ) -> List[PhaseSample]:
        with self._lock:
            selected = [
                s for s in self._samples
                if (phase is None or s.phase == phase) and (case_id is None or s.case_id == case_id)
            ]
        if limit:
            selected = selected[-limit:]
        return selected

    def phase_stats(self, phase: str) -> Dict[str, float]:
        """count, total/avg/min/max wall ms, avg cpu ms and peak rss for one phase."""
        selected = self.samples(phase)
        if not selected:
            return {'count': 0, 'total_wall_ms': 0.0, 'avg_wall_ms': 0.0, 'avg_cpu_ms': 0.0}

        walls = [s.wall_ms for s in selected]
        return {
            'count': len(selected),
            'total_wall_ms': sum(walls),
            'avg_wall_ms': sum(walls) / len(walls),
            'min_wall_ms': min(walls),
            'max_wall_ms': max(walls),
            'avg_cpu_ms': sum(s.cpu_ms for s in selected) / len(selected),
            'peak_rss_mb': max(s.rss_mb for s in selected),
        }

    def all_phase_stats(self) -> Dict[str, Dict[str, float]]:
        with self._lock:
            phases = list(dict.fromkeys(s.phase for s in self._samples))
        return {phase: self.phase_stats(phase) for phase in phases}

    def case_breakdown(self, case_id: str) -> Dict[str, float]:
        """Wall ms per phase of one case."""
        breakdown: Dict[str, float] = {}
        for s in self.samples(case_id=case_id):
            breakdown[s.phase] = breakdown.get(s.phase, 0.0) + s.wall_ms
        return breakdown

    def reset(self):
        with self._lock:
            self._samples.clear()


_global_monitor: Optional[PhaseMonitor] = None


def get_monitor() -> PhaseMonitor:
    """Get the process-wide phase monitor"""
    global _global_monitor
    if _global_monitor is None:
        _global_monitor = PhaseMonitor()
    return _global_monitor
