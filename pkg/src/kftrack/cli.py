"""Command-line front end: ``simulate``, ``bench`` and ``paper-repro``.

Exit status is 0 on success, 2 on usage errors and 1 when a run fails or an
output cannot be written.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import report
from .errors import KFError
from .localize import Anchor
from .sim import (
    PAPER_DT,
    PAPER_N_ITER,
    PAPER_SIGMA,
    Scenario,
    default_scenario,
    paper_scenario,
    run_monte_carlo,
    run_scenario,
)


@dataclass(frozen=True)
class CliConfig:
    command: str
    scenario: Scenario
    n_runs: int = 1
    trace: Optional[str] = None
    plot: Optional[str] = None
    report: Optional[str] = None
    summary: Optional[str] = None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError(text)
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError(text)
    return value


def _point(text: str) -> tuple[float, float]:
    x, y = text.split(",")
    return float(x), float(y)


_positive_int.__name__ = "positive integer"
_nonneg_int.__name__ = "non-negative integer"
_point.__name__ = "X,Y point"


def _scenario_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    g.add_argument("--dt", type=float, default=PAPER_DT, help="time step in seconds (default %(default)s)")
    g.add_argument("--n-iter", type=_positive_int, default=PAPER_N_ITER,
                   help="number of filter iterations (default %(default)s)")
    g.add_argument("--sigma", type=float, default=PAPER_SIGMA,
                   help="measurement noise std in meters, per axis or per range (default %(default)s)")
    g.add_argument("--seed", type=_nonneg_int, default=0, help="random seed (default %(default)s)")
    g.add_argument("--mode", choices=("direct", "toa"), default="direct",
                   help="measurement source: noisy position or ToA trilateration (default %(default)s)")
    g.add_argument("--anchor", type=_point, action="append", metavar="X,Y",
                   help="anchor position for --mode toa; repeat for each anchor "
                        "(default (0,0) (20,0) (0,20))")
    g.add_argument("--paper-faithful", action="store_true",
                   help="fold measurement noise to |N(0, sigma)| as the original demo does")
    g.add_argument("--center-on-estimate", action="store_true",
                   help="draw measurements around the running estimate instead of the truth")


def _output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trace", metavar="PATH", help="write the per-step trace CSV")
    p.add_argument("--plot", metavar="PATH", help="write the trajectory figure (SVG)")
    p.add_argument("--summary", metavar="PATH", help="also write the run summary text to PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kftrack", description="Kalman filter tracking simulator."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="run one seeded scenario")
    _scenario_flags(p)
    _output_flags(p)

    p = sub.add_parser("bench", help="Monte Carlo accuracy benchmark")
    p.add_argument("--runs", type=_positive_int, required=True, metavar="N",
                   help="number of runs; run i uses seed + i")
    _scenario_flags(p)
    p.add_argument("--report", metavar="PATH", help="write the benchmark table to PATH")
    p.add_argument("--plot", metavar="PATH",
                   help="write the per-run RMSE figure; format follows the suffix")

    p = sub.add_parser("paper-repro", help="replay the original demo loop literally")
    p.add_argument("--seed", type=_nonneg_int, default=0, help="random seed (default %(default)s)")
    _output_flags(p)
    return parser


def parse_args(argv: Sequence[str]) -> CliConfig:
    parser = build_parser()
    ns = parser.parse_args(list(argv))
    try:
        if ns.command == "paper-repro":
            scenario = paper_scenario(ns.seed)
        else:
            anchors = None
            if ns.anchor:
                anchors = [Anchor.at(f"a{i}", x, y) for i, (x, y) in enumerate(ns.anchor)]
            scenario = default_scenario(
                dt=ns.dt,
                n_iter=ns.n_iter,
                sigma=ns.sigma,
                seed=ns.seed,
                mode=ns.mode,
                paper_faithful=ns.paper_faithful,
                center_on_estimate=ns.center_on_estimate,
                anchors=anchors,
            )
    except (ValueError, KFError) as exc:
        parser.error(f"invalid scenario: {exc}")
    return CliConfig(
        command=ns.command,
        scenario=scenario,
        n_runs=getattr(ns, "runs", 1),
        trace=getattr(ns, "trace", None),
        plot=ns.plot,
        report=getattr(ns, "report", None),
        summary=getattr(ns, "summary", None),
    )


def _run_summary_text(cfg: CliConfig, run) -> str:
    fmt = report.fmt
    return (
        f"command           {cfg.command}\n"
        f"seed              {cfg.scenario.seed}\n"
        f"steps             {len(run.records)}\n"
        f"rmse_measurement  {fmt(run.rmse_measurement)}\n"
        f"rmse_filtered     {fmt(run.rmse_filtered)}\n"
        f"mean_nees         {fmt(run.mean_nees)}\n"
    )


def execute(cfg: CliConfig) -> None:
    # plotting imports matplotlib; only pay for it when a figure is requested
    if cfg.command == "bench":
        agg = run_monte_carlo(cfg.scenario, cfg.n_runs)
        text = report.format_bench_report(agg)
        sys.stdout.write(text)
        if cfg.report:
            report.emit_bench_report(agg, cfg.report)
        if cfg.plot:
            from .plotting import emit_bench_plot

            emit_bench_plot(agg, cfg.plot)
        return
    run = run_scenario(cfg.scenario)
    text = _run_summary_text(cfg, run)
    sys.stdout.write(text)
    if cfg.summary:
        with open(cfg.summary, "w", newline="\n") as fh:
            fh.write(text)
    if cfg.trace:
        report.emit_trace_csv(run, cfg.trace)
    if cfg.plot:
        from .plotting import emit_plot_svg

        emit_plot_svg(run, cfg.plot)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        execute(cfg)
    except (KFError, OSError) as exc:
        print(f"kftrack: error: {exc}", file=sys.stderr)
        return 1
    return 0


def run() -> None:
    sys.exit(main())
