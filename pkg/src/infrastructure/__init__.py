"""Infrastructure module initialization"""

from .logging import BenchLogger, get_logger, configure_logging
from .monitoring import (
    PhaseMonitor,
    PhaseSample,
    get_monitor,
)
from .config import (
    BenchSettings,
    ConfigLoader,
    ConfigValidator,
    get_settings,
    load_settings,
    reload_settings
)

__all__ = [
    # Logging
    'BenchLogger',
    'get_logger',
    'configure_logging',

    # Monitoring
    'PhaseMonitor',
    'PhaseSample',
    'get_monitor',

    # Configuration
    'BenchSettings',
    'ConfigLoader',
    'ConfigValidator',
    'get_settings',
    'load_settings',
    'reload_settings'
]
