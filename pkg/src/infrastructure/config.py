"""
Configuration Management

Provides:
- YAML/ENV settings loading
- Settings validation
- Process-wide defaults for the benchmark harness
"""

import os
import yaml
from pathlib import Path
from typing import Any, Dict, List, Optional
from dataclasses import dataclass, field, fields

from src.errors import ConfigLoadError, InvalidConfigurationError


DEFAULT_SETTINGS_FILE = Path("saddlebench.yaml")


@dataclass
class BenchSettings:
    """Process-wide saddlebench settings"""

    # Logging
    log_level: str = "WARNING"
    log_dir: Optional[Path] = None
    log_json_format: bool = True

    # Monitoring
    enable_monitoring: bool = True

    # Benchmark grid
    default_grid: List[int] = field(default_factory=lambda: [8, 16, 32])
    # relative --out paths resolve here
    output_dir: Path = field(default_factory=lambda: Path("results"))

    # Dense limits
    dense_limit: int = 5000
    spectral_max_p: int = 8

    # Solver defaults
    outer_maxit: int = 500
    inner_tol: float = 1e-6
    inner_maxit: int = 100
    droptol: float = 1e-2

    # Sweeps
    parallel_cases: bool = False
    max_workers: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            'log_level': self.log_level,
            'log_dir': str(self.log_dir) if self.log_dir else None,
            'log_json_format': self.log_json_format,
            'enable_monitoring': self.enable_monitoring,
            'default_grid': list(self.default_grid),
            'output_dir': str(self.output_dir),
            'dense_limit': self.dense_limit,
            'spectral_max_p': self.spectral_max_p,
            'outer_maxit': self.outer_maxit,
            'inner_tol': self.inner_tol,
            'inner_maxit': self.inner_maxit,
            'droptol': self.droptol,
            'parallel_cases': self.parallel_cases,
            'max_workers': self.max_workers,
        }


class ConfigLoader:
    """
    Settings loader with environment override support

    Priority (highest to lowest):
    1. Environment variables (SADDLEBENCH_*)
    2. Settings file (saddlebench.yaml)
    3. Default values
    """

    ENV_MAPPING = {
        'SADDLEBENCH_LOG_LEVEL': 'log_level',
        'SADDLEBENCH_LOG_DIR': 'log_dir',
        'SADDLEBENCH_MONITORING': 'enable_monitoring',
        'SADDLEBENCH_GRID': 'default_grid',
        'SADDLEBENCH_OUTPUT_DIR': 'output_dir',
        'SADDLEBENCH_DENSE_LIMIT': 'dense_limit',
        'SADDLEBENCH_INNER_TOL': 'inner_tol',
        'SADDLEBENCH_INNER_MAXIT': 'inner_maxit',
        'SADDLEBENCH_DROPTOL': 'droptol',
        'SADDLEBENCH_PARALLEL': 'parallel_cases',
        'SADDLEBENCH_MAX_WORKERS': 'max_workers',
    }

    @staticmethod
    def load(config_path: Optional[Path] = None) -> BenchSettings:
        """
        Load settings

        Args:
            config_path: Path to settings file (None = look for saddlebench.yaml)

        Returns:
            BenchSettings instance
        """
        settings = BenchSettings()

        explicit = config_path is not None
        if config_path is None:
            config_path = DEFAULT_SETTINGS_FILE
        config_path = Path(config_path)

        if config_path.exists():
            try:
                with open(config_path, 'r') as f:
                    file_config = yaml.safe_load(f)
            except (OSError, yaml.YAMLError) as exc:
                raise ConfigLoadError(str(config_path), str(exc)) from exc

            if file_config:
                if not isinstance(file_config, dict):
                    raise ConfigLoadError(str(config_path), "top level must be a mapping")
                settings = ConfigLoader._apply_dict_to_settings(settings, file_config)
        elif explicit:
            raise ConfigLoadError(str(config_path), "file does not exist")

        settings = ConfigLoader._apply_env_to_settings(settings)

        return settings

    @staticmethod
    def _apply_dict_to_settings(settings: BenchSettings, data: Dict[str, Any]) -> BenchSettings:
        """Apply dictionary values to settings"""
        known = {f.name for f in fields(BenchSettings)}
        for key, value in data.items():
            if key not in known:
                raise InvalidConfigurationError(key, value, "unknown settings key")
            if key.endswith('_dir') and value is not None:
                value = Path(value)
            setattr(settings, key, value)

        return settings

    @staticmethod
    def _apply_env_to_settings(settings: BenchSettings) -> BenchSettings:
        """Apply environment variables to settings"""
        for env_var, key in ConfigLoader.ENV_MAPPING.items():
            value = os.environ.get(env_var)
            if value is None:
                continue

            current = getattr(settings, key)
            try:
                if key in ('enable_monitoring', 'parallel_cases'):
                    converted: Any = value.lower() in ('true', '1', 'yes')
                elif key.endswith('_dir'):
                    converted = Path(value)
                elif key == 'default_grid':
                    converted = [int(part) for part in value.split(',') if part.strip()]
                elif key == 'max_workers':
                    converted = int(value) if value else None
                elif isinstance(current, bool):
                    converted = value.lower() in ('true', '1', 'yes')
                elif isinstance(current, int):
                    converted = int(value)
                elif isinstance(current, float):
                    converted = float(value)
                else:
                    converted = value
            except ValueError as exc:
                raise InvalidConfigurationError(key, value, f"from {env_var}: {exc}") from exc

            setattr(settings, key, converted)

        return settings

    @staticmethod
    def save(settings: BenchSettings, config_path: Path):
        """
        Save settings to file

        Args:
            settings: Settings to save
            config_path: Path to save to
        """
        with open(config_path, 'w') as f:
            yaml.dump(settings.to_dict(), f, default_flow_style=False)


class ConfigValidator:
    """Validate settings"""

    @staticmethod
    def validate(settings: BenchSettings) -> List[str]:
        """
        Validate settings

        Args:
            settings: Settings to validate

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []

        valid_log_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if str(settings.log_level).upper() not in valid_log_levels:
            errors.append(f"Invalid log_level: {settings.log_level}")

        if not settings.default_grid or any(int(p) < 2 for p in settings.default_grid):
            errors.append(f"default_grid must list grid sizes >= 2: {settings.default_grid}")

        if settings.dense_limit <= 0:
            errors.append(f"dense_limit must be positive: {settings.dense_limit}")

        if settings.spectral_max_p < 2:
            errors.append(f"spectral_max_p must be >= 2: {settings.spectral_max_p}")

        if settings.outer_maxit <= 0:
            errors.append(f"outer_maxit must be positive: {settings.outer_maxit}")

        if not 0 < settings.inner_tol < 1:
            errors.append(f"inner_tol must lie in (0, 1): {settings.inner_tol}")

        if settings.inner_maxit <= 0:
            errors.append(f"inner_maxit must be positive: {settings.inner_maxit}")

        if settings.droptol <= 0:
            errors.append(f"droptol must be positive: {settings.droptol}")

        if settings.max_workers is not None and settings.max_workers <= 0:
            errors.append(f"max_workers must be positive: {settings.max_workers}")

        return errors


# Global settings
_global_settings: Optional[BenchSettings] = None


def get_settings() -> BenchSettings:
    """Get global settings"""
    global _global_settings
    if _global_settings is None:
        _global_settings = ConfigLoader.load()
    return _global_settings


def load_settings(config_path: Optional[Path] = None) -> BenchSettings:
    """Load, validate and set global settings"""
    global _global_settings
    settings = ConfigLoader.load(config_path)

    errors = ConfigValidator.validate(settings)
    if errors:
        raise InvalidConfigurationError("settings", config_path or DEFAULT_SETTINGS_FILE, "; ".join(errors))

    _global_settings = settings
    return _global_settings


def reload_settings() -> BenchSettings:
    """Reload settings from file/environment"""
    global _global_settings
    _global_settings = None
    return get_settings()
