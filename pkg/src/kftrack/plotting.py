"""Matplotlib figures for single runs and Monte Carlo benchmarks.

Figures are built on bare ``Figure`` objects (no pyplot state).  SVG output
is made byte-reproducible by fixing the hash salt used for element ids,
keeping text as ``<text>`` elements and dropping the date metadata.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .sim import MonteCarloSummary, RunSummary

VIEWPORT = (800, 600)  # SVG user units (pt)
MARGIN = 0.05

_RC = {
    "svg.hashsalt": "kftrack",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "axes.xmargin": MARGIN,
    "axes.ymargin": MARGIN,
}


def _new_figure() -> Figure:
    w, h = VIEWPORT
    return Figure(figsize=(w / 72.0, h / 72.0), dpi=72)


def _save(fig: Figure, path, fmt=None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = fmt or (path.suffix.lstrip(".").lower() or "svg")
    metadata = {"Date": None} if fmt == "svg" else None
    try:
        fig.savefig(path, format=fmt, metadata=metadata)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write figure: {exc.strerror}", os.fspath(path)) from exc


def trace_figure(summary: RunSummary) -> Figure:
    if not summary.records:
        raise ValueError("cannot plot an empty run")
    truth = np.array([r.true_state[:2] for r in summary.records])
    meas = np.array([r.measurement for r in summary.records])
    est = np.array([r.posterior_mean[:2] for r in summary.records])
    fig = _new_figure()
    ax = fig.add_subplot()
    ax.plot(truth[:, 0], truth[:, 1], "-o", color="tab:green", ms=3, lw=1.5, label="true trajectory")
    ax.plot(meas[:, 0], meas[:, 1], "x", color="tab:red", ms=5, label="trilateration / measurement")
    ax.plot(est[:, 0], est[:, 1], "-s", color="tab:blue", ms=3, lw=1.5, label="Kalman estimate")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("Kalman filter tracking")
    ax.grid(True, lw=0.4, alpha=0.5)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    return fig


def emit_plot_svg(summary: RunSummary, path) -> None:
    """Write the truth / measurement / estimate figure as a standalone SVG."""
    with matplotlib.rc_context(_RC):
        fig = trace_figure(summary)
        _save(fig, path, "svg")


def bench_figure(agg: MonteCarloSummary) -> Figure:
    seeds = agg.first_seed + np.arange(agg.n_runs)
    fig = _new_figure()
    ax = fig.add_subplot()
    ax.plot(seeds, agg.rmse_measurement_runs, "x", color="tab:red", label="measurement RMSE")
    ax.plot(seeds, agg.rmse_filtered_runs, "o", color="tab:blue", ms=4, label="filtered RMSE")
    ax.axhline(agg.rmse_measurement_mean, color="tab:red", lw=0.8, ls="--")
    ax.axhline(agg.rmse_filtered_mean, color="tab:blue", lw=0.8, ls="--")
    ax.set_xlabel("seed")
    ax.set_ylabel("position RMSE [m]")
    ax.set_title(f"{agg.n_runs} runs, ratio {agg.improvement_ratio:.3f}")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    return fig


def emit_bench_plot(agg: MonteCarloSummary, path) -> None:
    """Per-seed RMSE comparison; format follows the file suffix."""
    with matplotlib.rc_context(_RC):
        _save(bench_figure(agg), path)
