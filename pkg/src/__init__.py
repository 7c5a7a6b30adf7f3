"""saddlebench: block preconditioners for double saddle-point systems."""

__version__ = "0.1.0"
