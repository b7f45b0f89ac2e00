"""Phase-diagram plotting for budget-constrained random graph sweeps."""

from .render import (MissingColumnError, PlotSpec, fifty_percent_contour,
                     load_sweep, load_thresholds, log_n, render_phase,
                     success_grid)

__version__ = "0.1.0"
