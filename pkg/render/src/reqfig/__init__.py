"""Offline figure rendering for sweep CSVs."""
from __future__ import annotations

from .render import PlotJob, SchemaError, load_table, main, render

__version__ = "0.1.0"

__all__ = ["PlotJob", "SchemaError", "load_table", "main", "render", "__version__"]
