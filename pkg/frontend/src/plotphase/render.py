"""Phase-diagram rendering from sweep and threshold CSV files.

Axes follow the log_n convention: a grid point (t, b) at vertex count n is
drawn at (log t / log n, log b / log n).  Success rates are shown as a
heatmap over the grid actually swept; cells never sampled stay blank (no
interpolation).  Threshold envelopes are drawn from the thresholds CSV as
overlay curves, never re-derived here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

SWEEP_COLUMNS = ["n", "t", "b", "family", "strategy", "seed", "success",
                 "hit_step", "budget_used", "degraded", "runtime_ms"]
THRESHOLD_COLUMNS = ["family", "n", "t", "lower", "upper", "cutoff_ok"]


class MissingColumnError(ValueError):
    """A CSV lacks one of the schema columns; the message names it."""


@dataclass(frozen=True)
class PlotSpec:
    """Inputs for one phase figure."""

    thresholds_csv: str
    out: str
    family: str = ""
    sweep_csv: str | None = None
    dpi: int = 130


def _require_columns(df: pd.DataFrame, needed, what: str):
    for col in needed:
        if col not in df.columns:
            raise MissingColumnError(f"{what} CSV is missing column {col!r}")


def load_sweep(path: str) -> pd.DataFrame:
    df = pd.read_csv(path)
    if len(df) == 0 and len(df.columns) <= 1:
        return pd.DataFrame(columns=SWEEP_COLUMNS)
    _require_columns(df, SWEEP_COLUMNS, "sweep")
    return df


def load_thresholds(path: str) -> pd.DataFrame:
    df = pd.read_csv(path)
    _require_columns(df, THRESHOLD_COLUMNS, "thresholds")
    return df


def log_n(values, n) -> np.ndarray:
    """log base n, the figure coordinate transform."""
    return np.log10(np.asarray(values, dtype=float)) / np.log10(np.asarray(n, dtype=float))


def success_grid(sweep: pd.DataFrame):
    """Success-rate matrix over the swept (t, b) grid in log_n coordinates.

    Returns (xs, ys, rate_matrix) with NaN where a cell was never sampled.
    """
    rates = (sweep.groupby(["n", "t", "b"])["success"].mean().reset_index())
    xs = np.unique(log_n(rates["t"], rates["n"]))
    ys = np.unique(log_n(rates["b"], rates["n"]))
    grid = np.full((len(ys), len(xs)), np.nan)
    for _, row in rates.iterrows():
        xi = int(np.argmin(np.abs(xs - log_n(row["t"], row["n"]))))
        yi = int(np.argmin(np.abs(ys - log_n(row["b"], row["n"]))))
        grid[yi, xi] = row["success"]
    return xs, ys, grid


def _cell_edges(centres: np.ndarray) -> np.ndarray:
    if len(centres) == 1:
        return np.array([centres[0] - 0.05, centres[0] + 0.05])
    mids = (centres[:-1] + centres[1:]) / 2
    first = centres[0] - (mids[0] - centres[0])
    last = centres[-1] + (centres[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def fifty_percent_contour(sweep: pd.DataFrame):
    """Per t-column, the log_n b where the empirical rate crosses 1/2.

    Linear interpolation in log_n b between the last sub-half and first
    at-least-half grid rows; columns that never cross are skipped.
    Returns (x, y_cross) arrays.
    """
    xs, ys, grid = success_grid(sweep)
    out_x, out_y = [], []
    for xi, x in enumerate(xs):
        col = grid[:, xi]
        ok = ~np.isnan(col)
        ys_col, col = ys[ok], col[ok]
        crossing = None
        for k in range(len(col) - 1):
            if col[k] < 0.5 <= col[k + 1]:
                frac = (0.5 - col[k]) / (col[k + 1] - col[k])
                crossing = ys_col[k] + frac * (ys_col[k + 1] - ys_col[k])
        if crossing is None and len(col) and col[0] >= 0.5:
            crossing = ys_col[0]
        if crossing is not None:
            out_x.append(x)
            out_y.append(crossing)
    return np.asarray(out_x), np.asarray(out_y)


def render_phase(spec: PlotSpec) -> str:
    """Draw the phase figure and return the output path."""
    thresholds = load_thresholds(spec.thresholds_csv)
    sweep = load_sweep(spec.sweep_csv) if spec.sweep_csv else pd.DataFrame(
        columns=SWEEP_COLUMNS)

    fig, ax = plt.subplots(figsize=(7.2, 5.4))
    title = spec.family or (str(thresholds["family"].iloc[0]) if len(thresholds) else "")

    if len(sweep):
        xs, ys, grid = success_grid(sweep)
        mesh = ax.pcolormesh(_cell_edges(xs), _cell_edges(ys),
                             np.ma.masked_invalid(grid),
                             cmap="viridis", vmin=0.0, vmax=1.0, shading="flat")
        fig.colorbar(mesh, ax=ax, label="success rate")
    else:
        if spec.sweep_csv:
            warnings.warn("sweep CSV has no rows; rendering envelope-only figure")
        title = f"{title} (envelopes only)".strip()

    if len(thresholds):
        thr = thresholds.sort_values("t")
        x = log_n(thr["t"], thr["n"])
        ax.plot(x, log_n(thr["lower"], thr["n"]), color="crimson", lw=2,
                label="lower envelope")
        uppers = pd.to_numeric(thr["upper"], errors="coerce")
        if uppers.notna().all():
            ax.plot(x, log_n(uppers, thr["n"]), color="orange", lw=2, ls="--",
                    label="upper envelope")
        ax.legend(loc="upper right")

    ax.set_xlabel(r"$\log_n t$")
    ax.set_ylabel(r"$\log_n b$")
    ax.set_title(title)
    fig.tight_layout()
    # metadata Date=None keeps the PNG byte-stable across runs
    fig.savefig(spec.out, dpi=spec.dpi, metadata={"Date": None})
    plt.close(fig)
    return spec.out
