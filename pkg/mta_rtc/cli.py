"""Console script for mta_rtc."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import dataclasses
import logging
import os
import sys
from enum import Enum
from typing import NoReturn, Optional, Sequence, Tuple

import click

from mta_rtc.config import ConfigError, check_granularities, parse_config_file
from mta_rtc.curves import (
    Curve,
    CurveError,
    EmptyCurveError,
    combine,
    combine_naive,
    format_bound,
    sample,
    validate,
)
from mta_rtc.engine import BufferOverflow
from mta_rtc.oracle import OracleConfig, OracleError, exact_output_curve
from mta_rtc.pipeline import (
    NAIVE_FILENAME,
    REFINED_FILENAME,
    improved_points,
    run_analysis,
    write_report,
)
from mta_rtc.plot import plot_curves
from mta_rtc.translate import TranslationError

log = logging.getLogger(__name__)

ORACLE_FILENAME = "oracle_curve.csv"
PLOT_FILENAME = "curves.svg"


class ExitCode(Enum):
    SUCCESS = 0
    CONFIG_ERROR = 2
    BUDGET_EXHAUSTED = 3
    EMPTY_CURVE = 4
    ORACLE_BOUNDS = 5
    SELF_CHECK_FAILED = 6


def _fail(exit_code: ExitCode, message: str) -> NoReturn:
    click.echo(f"Error: {message}", err=True)
    raise SystemExit(exit_code.value)


def _read_curve(curve_filepath: str) -> Curve:
    try:
        c = Curve.from_file(curve_filepath)
    except (OSError, CurveError) as exc:
        log.exception("")
        _fail(ExitCode.CONFIG_ERROR, f"{curve_filepath}: {exc}")

    violation = validate(c)
    if violation is not None:
        _fail(ExitCode.CONFIG_ERROR, f"{curve_filepath}: k={violation}")
    return c


@click.group()
@click.option(
    "-l", "--log-filepath", default=None, help="Write logging output to a log file"
)
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr")
def main(log_filepath: Optional[str], verbose: bool) -> ExitCode:
    """Output arrival curves of power-managed components at several
    granularities."""

    if log_filepath is not None:
        logging.basicConfig(
            filename=log_filepath,
            format="%(asctime)s %(name)s [%(levelname)s]: %(message)s",
            level=logging.INFO,
        )
    elif verbose:
        logging.basicConfig(
            format="%(asctime)s %(name)s [%(levelname)s]: %(message)s",
            level=logging.INFO,
        )
    else:
        logging.basicConfig(level=logging.WARNING)

    return ExitCode.SUCCESS


@click.command()
@click.option(
    "-c", "--config", "config_filepath", required=True, help="System description"
)
@click.option("-o", "--out", "out_dir", default=None, help="Output directory")
@click.option(
    "-g",
    "--granularity",
    "granularities",
    type=int,
    multiple=True,
    help="Granularity to analyse, repeatable; replaces the configured list",
)
@click.option("--fine", is_flag=True, help="Include the fine (g=1) analysis")
@click.option("--state-budget", type=int, default=None, help="States per task")
@click.option("--jobs", type=int, default=None, help="Parallel analysis tasks")
def analyze(
    config_filepath: str,
    out_dir: Optional[str],
    granularities: Tuple[int, ...],
    fine: bool,
    state_budget: Optional[int],
    jobs: Optional[int],
) -> None:
    """Analyse a system description and write curves, stats and a report"""
    try:
        desc = parse_config_file(config_filepath)
        if granularities:
            desc = dataclasses.replace(desc, granularities=granularities)
            check_granularities(desc)
    except ConfigError as exc:
        log.exception("")
        _fail(ExitCode.CONFIG_ERROR, str(exc))

    if state_budget is not None and state_budget < 1:
        _fail(ExitCode.CONFIG_ERROR, "--state-budget must be >= 1")
    if jobs is not None and jobs < 1:
        _fail(ExitCode.CONFIG_ERROR, "--jobs must be >= 1")

    try:
        report = run_analysis(desc, None, fine, state_budget, jobs)
    except (TranslationError, CurveError, BufferOverflow) as exc:
        log.exception("")
        _fail(ExitCode.CONFIG_ERROR, str(exc))

    out_dir = out_dir or desc.output_dir
    write_report(report, out_dir)

    for g, result in sorted(report.results.items()):
        stats = result.stats
        click.echo(
            f"g={g}: {result.curve.n} points, {stats.explored} states explored"
            f"{' (partial)' if result.partial else ''}"
        )
    for g, d in sorted(report.distances.items()):
        click.echo(f"distance g={g}: {d}")
    click.echo(f"Results written to {out_dir}")

    if report.lemma1:
        for g, violation in report.lemma1:
            click.echo(f"g={g} k={violation}", err=True)
        _fail(ExitCode.SELF_CHECK_FAILED, "coarse curves tighter than the fine curve")

    if report.empty is not None:
        _fail(ExitCode.EMPTY_CURVE, report.empty)

    if report.partial:
        _fail(ExitCode.BUDGET_EXHAUSTED, "state budget exhausted, results partial")


@click.command()
@click.option(
    "-c",
    "--curve",
    "curves",
    type=(int, str),
    multiple=True,
    required=True,
    help="Granularity and curve CSV file, repeatable",
)
@click.option("-o", "--out", "out_dir", default=".", help="Output directory")
def combine_cmd(curves: Sequence[Tuple[int, str]], out_dir: str) -> None:
    """Combine curves analysed at several granularities"""
    coarse_results = []
    for g, curve_filepath in curves:
        if g < 1:
            _fail(ExitCode.CONFIG_ERROR, f"granularity must be >= 1, got {g}")
        coarse_results.append((g, _read_curve(curve_filepath)))

    naive = combine_naive(coarse_results)
    try:
        refined = combine(coarse_results)
    except EmptyCurveError as exc:
        log.exception("")
        _fail(ExitCode.EMPTY_CURVE, str(exc))

    os.makedirs(out_dir, exist_ok=True)
    naive.to_file(os.path.join(out_dir, NAIVE_FILENAME))
    refined.to_file(os.path.join(out_dir, REFINED_FILENAME))

    improved = set(improved_points(naive, refined))
    for k in range(1, naive.n + 1):
        (naive_lo, naive_up), (lo, up) = naive.point(k), refined.point(k)
        click.echo(
            f"k={k}: lower {format_bound(naive_lo)} -> {format_bound(lo)}, "
            f"upper {format_bound(naive_up)} -> {format_bound(up)}"
            f"{' (improved)' if k in improved else ''}"
        )


@click.command()
@click.option(
    "-c", "--config", "config_filepath", required=True, help="System description"
)
@click.option("-o", "--out", "out_dir", default=None, help="Output directory")
@click.option("--max-events", type=int, default=None, help="Input events per run")
@click.option("--horizon", type=int, default=None, help="Time horizon")
@click.option("--jobs", type=int, default=1, help="Parallel workers")
def oracle(
    config_filepath: str,
    out_dir: Optional[str],
    max_events: Optional[int],
    horizon: Optional[int],
    jobs: int,
) -> None:
    """Exact output curve of a small system by exhaustive simulation"""
    try:
        desc = parse_config_file(config_filepath)
    except ConfigError as exc:
        log.exception("")
        _fail(ExitCode.CONFIG_ERROR, str(exc))

    config = OracleConfig(
        mta=desc.mta,
        arrival=desc.arrival,
        max_events=max_events or desc.oracle.max_events,
        horizon=horizon or desc.oracle.horizon,
        max_backlog=desc.engine.max_backlog,
        channels=desc.channels,
    )
    try:
        c = exact_output_curve(config, desc.n, jobs=jobs)
    except OracleError as exc:
        log.exception("")
        _fail(ExitCode.ORACLE_BOUNDS, str(exc))

    out_dir = out_dir or desc.output_dir
    os.makedirs(out_dir, exist_ok=True)
    out_filepath = os.path.join(out_dir, ORACLE_FILENAME)
    c.to_file(out_filepath)
    click.echo(c.serialisation, nl=False)
    log.info("Wrote oracle curve to %s", out_filepath)


@click.command()
@click.argument("curve_filepaths", nargs=-1)
@click.option(
    "-g",
    "--granularity",
    "granularities",
    type=int,
    multiple=True,
    help="Granularity of each curve file in order, default 1",
)
@click.option("-o", "--out", "out_filepath", default=PLOT_FILENAME, help="SVG file")
@click.option("-t", "--title", default="Interval-length curves", help="Plot title")
def plot(
    curve_filepaths: Tuple[str, ...],
    granularities: Tuple[int, ...],
    out_filepath: str,
    title: str,
) -> None:
    """Staircase plot of curve files on fine event indices"""
    if not curve_filepaths:
        _fail(ExitCode.CONFIG_ERROR, "at least one curve file is needed")

    if granularities and len(granularities) != len(curve_filepaths):
        _fail(ExitCode.CONFIG_ERROR, "give one --granularity per curve file")

    curves = [
        (os.path.splitext(os.path.basename(path))[0], _read_curve(path))
        for path in curve_filepaths
    ]
    plot_curves(curves, out_filepath, granularities or None, title)


@click.command(name="sample")
@click.option("-c", "--curve", "curve_filepath", required=True, help="Curve CSV")
@click.option("-g", "--granularity", type=int, required=True, help="Granularity")
@click.option("-o", "--out", "out_filepath", default=None, help="Output CSV file")
def sample_cmd(curve_filepath: str, granularity: int, out_filepath: Optional[str]):
    """Sample a curve at granularity g"""
    c = _read_curve(curve_filepath)
    try:
        coarse = sample(c, granularity)
    except CurveError as exc:
        log.exception("")
        _fail(ExitCode.CONFIG_ERROR, str(exc))

    if out_filepath is not None:
        coarse.to_file(out_filepath)
    else:
        click.echo(coarse.serialisation, nl=False)


main.add_command(analyze)
main.add_command(combine_cmd, name="combine")
main.add_command(oracle)
main.add_command(plot)
main.add_command(sample_cmd)


if __name__ == "__main__":
    status = main()
    sys.exit(status)  # pragma: no cover
