"""Analysis of a system description at several granularities, combination of
the resulting curves and the report written next to them."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import yaml

from .automata import Automaton
from .config import SystemDescription
from .curves import (
    Curve,
    EmptyCurveError,
    Violation,
    combine,
    combine_naive,
    distance,
    format_bound,
    sample,
)
from .engine import (
    RunStats,
    TaskResult,
    analyze_lower,
    analyze_upper,
    stats_to_csv,
    total_stats,
)
from .translate import (
    REQ,
    GeneratorSpec,
    build_coarse,
    build_environment,
    build_fine,
    build_generator,
)

log = logging.getLogger(__name__)

INPUT = "Input"

REPORT_FILENAME = "report.yaml"
DISTANCE_FILENAME = "distance.csv"
NAIVE_FILENAME = "combined_naive.csv"
REFINED_FILENAME = "combined_refined.csv"


def curve_filename(g: int) -> str:
    return f"curve_g{g}.csv"


def stats_filename(g: int, kind: str) -> str:
    return f"stats_g{g}_{kind}.csv"


@dataclass
class GranularityResult:
    """Output curve at one granularity, indexed by coarse event count"""

    g: int
    curve: Curve
    lower_results: List[TaskResult]
    upper_results: List[TaskResult]

    @property
    def partial(self) -> bool:
        return any(r.exhausted for r in self.lower_results + self.upper_results)

    @property
    def stats(self) -> RunStats:
        return total_stats(self.lower_results + self.upper_results)


@dataclass
class AnalysisReport:
    results: Dict[int, GranularityResult] = field(default_factory=dict)
    naive: Optional[Curve] = None
    refined: Optional[Curve] = None
    distances: Dict[int, Union[Fraction, float]] = field(default_factory=dict)
    lemma1: List[Tuple[int, Violation]] = field(default_factory=list)
    empty: Optional[str] = None

    @property
    def partial(self) -> bool:
        return any(r.partial for r in self.results.values())

    @property
    def fine(self) -> Optional[Curve]:
        return self.results[1].curve if 1 in self.results else None

    def coarse_results(self) -> List[Tuple[int, Curve]]:
        return [(g, r.curve) for g, r in sorted(self.results.items())]


def build_system(desc: SystemDescription, g: int) -> Tuple[Automaton, ...]:
    """Input generator, PE/SM pair and sync-channel environments at granularity g"""
    arrival = desc.arrival if g == 1 else sample(desc.arrival, g)
    input_gen = build_generator(GeneratorSpec(arrival, REQ, INPUT))

    max_backlog = desc.engine.max_backlog
    if g == 1:
        pe, sm = build_fine(desc.mta, max_backlog)
    else:
        pe, sm = build_coarse(desc.mta, g, max_backlog)

    envs = tuple(
        build_environment(channel, curve) for channel, curve in desc.channels.items()
    )
    return (input_gen, pe, sm) + envs


def analyze_granularity(
    desc: SystemDescription,
    g: int,
    state_budget: int,
    jobs: int = 1,
) -> GranularityResult:
    """Lower and upper output curve at granularity g.

    Tasks that exhaust the state budget contribute their trivial bound and mark
    the result partial. Raises BufferOverflow when a request can reach a full
    buffer before the analysed window closes.
    """
    n_g = desc.n // g
    log.info("Analysing g=%d with %d coarse points", g, n_g)
    system = build_system(desc, g)

    lower, lower_results = analyze_lower(
        system, n_g, state_budget, jobs, keep_going=True
    )
    upper, upper_results = analyze_upper(
        system, desc.engine.horizon, n_g, state_budget, jobs, keep_going=True
    )
    result = GranularityResult(g, Curve(lower, upper), lower_results, upper_results)

    stats = result.stats
    log.info(
        "Finished g=%d: %d states explored, %d stored%s",
        g,
        stats.explored,
        stats.stored,
        " (partial)" if result.partial else "",
    )
    return result


def check_lemma1(fine: Curve, coarse: Curve, g: int) -> List[Violation]:
    """Points where a coarse curve is tighter than the fine curve it abstracts"""
    violations = []
    for k in range(1, coarse.n + 1):
        if g * k > fine.n:
            break

        fine_lo, fine_up = fine.point(g * k)
        lo, up = coarse.point(k)
        if lo > fine_lo:
            violations.append(
                Violation(
                    k,
                    f"coarse lower {format_bound(lo)} > fine lower "
                    f"{format_bound(fine_lo)} at k={g * k}",
                )
            )
        if up < fine_up:
            violations.append(
                Violation(
                    k,
                    f"coarse upper {format_bound(up)} < fine upper "
                    f"{format_bound(fine_up)} at k={g * k}",
                )
            )

    return violations


def distances(
    fine: Curve, coarse_results: Sequence[Tuple[int, Curve]]
) -> Dict[int, Union[Fraction, float]]:
    return {
        g: distance(fine, coarse, g) for g, coarse in coarse_results if g > 1
    }


def run_analysis(
    desc: SystemDescription,
    granularities: Optional[Sequence[int]] = None,
    include_fine: bool = False,
    state_budget: Optional[int] = None,
    jobs: Optional[int] = None,
) -> AnalysisReport:
    """Analyse every requested granularity, then combine and self-check.

    Contradictory combined curves leave ``naive``/``refined`` unset and the
    reason in ``empty``.
    """
    gs = set(desc.granularities if granularities is None else granularities)
    if include_fine:
        gs.add(1)
    if state_budget is None:
        state_budget = desc.engine.state_budget
    if jobs is None:
        jobs = desc.engine.jobs

    report = AnalysisReport()
    for g in sorted(gs):
        report.results[g] = analyze_granularity(desc, g, state_budget, jobs)

    coarse_results = report.coarse_results()
    try:
        report.naive = combine_naive(coarse_results)
        report.refined = combine(coarse_results)
    except EmptyCurveError as exc:
        log.error("Combined curves are contradictory: %s", exc)
        report.empty = str(exc)

    fine = report.fine
    if fine is not None:
        for g, coarse in coarse_results:
            if g == 1 or report.results[g].partial or report.results[1].partial:
                continue
            report.lemma1.extend((g, v) for v in check_lemma1(fine, coarse, g))

        report.distances = distances(fine, coarse_results)

    return report


def _distance_value(d: Union[Fraction, float]) -> str:
    return "inf" if math.isinf(d) else str(d)


def report_to_dict(report: AnalysisReport) -> dict:
    """Deterministic summary, timings are kept out of it"""
    granularities = {}
    for g, r in sorted(report.results.items()):
        stats = r.stats
        granularities[g] = {
            "points": r.curve.n,
            "curve": curve_filename(g),
            "states_explored": stats.explored,
            "states_stored": stats.stored,
            "partial": r.partial,
            "exhausted": sorted(
                {
                    f"{kind}:{t.param}"
                    for kind, results in (
                        ("lower", r.lower_results),
                        ("upper", r.upper_results),
                    )
                    for t in results
                    if t.exhausted
                }
            ),
        }

    return {
        "partial": report.partial,
        "granularities": granularities,
        "combined": {"naive": NAIVE_FILENAME, "refined": REFINED_FILENAME},
        "improved": improved_points(report.naive, report.refined)
        if report.naive is not None and report.refined is not None
        else [],
        "distances": {g: _distance_value(d) for g, d in report.distances.items()},
        "empty": report.empty,
        "lemma1": {
            "checked": report.fine is not None,
            "violations": [f"g={g} k={v}" for g, v in report.lemma1],
        },
    }


def improved_points(naive: Curve, refined: Curve) -> List[int]:
    """Indices where refinement tightened the naive combination"""
    return [
        k
        for k in range(1, naive.n + 1)
        if refined.point(k)[0] > naive.point(k)[0]
        or refined.point(k)[1] < naive.point(k)[1]
    ]


def write_report(report: AnalysisReport, out_dir: str) -> List[str]:
    """Write curves, stats and the summary to ``out_dir``, return the paths"""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def _write(filename: str, content: str) -> None:
        path = os.path.join(out_dir, filename)
        with open(path, "w", newline="") as out_file:
            out_file.write(content)
        written.append(path)

    for g, r in sorted(report.results.items()):
        _write(curve_filename(g), r.curve.serialisation)
        _write(stats_filename(g, "lower"), stats_to_csv(r.lower_results))
        _write(stats_filename(g, "upper"), stats_to_csv(r.upper_results))

    if report.naive is not None:
        _write(NAIVE_FILENAME, report.naive.serialisation)
    if report.refined is not None:
        _write(REFINED_FILENAME, report.refined.serialisation)

    if report.distances:
        lines = ["g,distance,distance_float"]
        for g, d in sorted(report.distances.items()):
            lines.append(f"{g},{_distance_value(d)},{float(d):.4f}")
        _write(DISTANCE_FILENAME, "\n".join(lines) + "\n")

    summary = report_to_dict(report)
    _write(REPORT_FILENAME, yaml.safe_dump(summary, default_flow_style=False))
    log.info("Wrote %d files to %s", len(written), out_dir)
    return written
