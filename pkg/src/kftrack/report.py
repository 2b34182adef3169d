"""Delimited trace output and the plain-text benchmark table."""

from __future__ import annotations

import csv
import os
from pathlib import Path

from .sim import MonteCarloSummary, RunSummary

TRACE_HEADER = (
    "step", "true_x", "true_y", "meas_x", "meas_y",
    "est_x", "est_y", "est_vx", "est_vy",
    "p00", "p11", "p22", "p33", "nees", "nll",
)


def fmt(value: float) -> str:
    """Render a float with 9 significant digits."""
    return f"{value:.9g}"


def _prepare(path) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def trace_rows(summary: RunSummary):
    for rec in summary.records:
        yield [str(rec.step)] + [
            fmt(float(v))
            for v in (
                *rec.true_state[:2],
                *rec.measurement,
                *rec.posterior_mean,
                *rec.posterior_cov_diag,
                rec.nees,
                rec.neg_log_likelihood,
            )
        ]


def emit_trace_csv(summary: RunSummary, path) -> None:
    try:
        path = _prepare(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            writer.writerows(trace_rows(summary))
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write trace CSV: {exc.strerror}", os.fspath(path)) from exc


def read_trace_csv(path) -> list[dict]:
    """Parse a trace written by ``emit_trace_csv`` back into dicts of floats."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected trace header {reader.fieldnames}")
        return [
            {k: int(v) if k == "step" else float(v) for k, v in row.items()}
            for row in reader
        ]


def format_bench_report(agg: MonteCarloSummary) -> str:
    lines = [
        f"n_runs              {agg.n_runs}",
        f"first_seed          {agg.first_seed}",
        f"rmse_measurement_m  {fmt(agg.rmse_measurement_mean)} +/- {fmt(agg.rmse_measurement_se)}",
        f"rmse_filtered_m     {fmt(agg.rmse_filtered_mean)} +/- {fmt(agg.rmse_filtered_se)}",
        f"mean_nees           {fmt(agg.mean_nees_mean)} +/- {fmt(agg.mean_nees_se)}",
        f"improvement_ratio   {fmt(agg.improvement_ratio)}",
        f"filtered_better     {agg.n_filtered_better}/{agg.n_runs}",
    ]
    return "\n".join(lines) + "\n"


def emit_bench_report(agg: MonteCarloSummary, path) -> None:
    try:
        path = _prepare(path)
        with open(path, "w", newline="\n") as fh:
            fh.write(format_bench_report(agg))
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write bench report: {exc.strerror}", os.fspath(path)) from exc
