"""CLI UI Components"""

from src.cli.ui.error_display import ErrorFormatter, format_error, print_error

__all__ = [
    "ErrorFormatter",
    "format_error",
    "print_error",
]
