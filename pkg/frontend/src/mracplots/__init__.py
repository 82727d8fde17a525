"""Figure rendering for simulation trace CSVs."""

from .figures import plot_four_panel, plot_overlay
from .traceframe import (
    REQUIRED_COLUMNS,
    MissingColumn,
    NonMonotoneTime,
    TraceError,
    TraceFrame,
    load_trace,
)

__version__ = "0.1.0"

__all__ = [
    "REQUIRED_COLUMNS",
    "MissingColumn",
    "NonMonotoneTime",
    "TraceError",
    "TraceFrame",
    "load_trace",
    "plot_four_panel",
    "plot_overlay",
    "__version__",
]
