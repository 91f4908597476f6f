"""Min-cost reachability over automata networks and the per-K / per-window
analysis loops built on it."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import csv
import heapq
import io
import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Tuple

from .automata import Automaton, Network, NetworkState, successors
from .curves import INF, Bound, CountCurve, format_bound, pseudo_invert_upper
from .translate import (
    OVERFLOW,
    PE,
    STOP,
    ObserverSpec,
    ObserverVariant,
    build_observer,
)

log = logging.getLogger(__name__)

DEFAULT_STATE_BUDGET = 10_000_000

OBSERVER = "Observer"


class EngineError(Exception):
    """Base error for analyses"""


@dataclass
class RunStats:
    """``explored`` counts generated states, ``stored`` the distinct ones kept"""

    explored: int = 0
    stored: int = 0
    millis: float = 0.0
    peak_frontier: int = 0

    def __add__(self, other: "RunStats") -> "RunStats":
        return RunStats(
            self.explored + other.explored,
            self.stored + other.stored,
            self.millis + other.millis,
            max(self.peak_frontier, other.peak_frontier),
        )


class StateBudgetExceeded(EngineError):
    """More states stored than the configured budget allows"""

    def __init__(self, message: str, stats: RunStats) -> None:
        super().__init__(message)
        self.stats = stats


class ErrorLocationReached(EngineError):
    """The search expanded a state in one of the task's error locations"""


class BufferOverflow(EngineError):
    """A request can arrive while the buffer is at its declared capacity"""


@dataclass(frozen=True)
class AnalysisTask:
    """Reach ``target`` = (automaton, location) at least accumulated cost.

    Expanding a state in one of the ``errors`` locations aborts the search.
    """

    network: Network
    target: Tuple[str, str] = (OBSERVER, STOP)
    state_budget: int = DEFAULT_STATE_BUDGET
    errors: Tuple[Tuple[str, str], ...] = ()


class TaskResult(NamedTuple):
    param: int
    cost: Bound
    stats: RunStats
    exhausted: bool = False


def min_cost(task: AnalysisTask, dominance: bool = True) -> Tuple[Bound, RunStats]:
    """Uniform-cost search from the initial state to the target location.

    With ``dominance`` a successor is only queued when it improves on the best
    cost seen for its state; otherwise states are merely closed once expanded.
    Returns the sentinel cost when the target is unreachable. Error locations
    are checked before the target, so one reached at a cost below the optimum
    always raises ErrorLocationReached.
    """
    net = task.network
    a_idx = net.automaton_index(task.target[0])
    loc_idx = net.location_index(*task.target)
    errors = [
        (net.automaton_index(a), net.location_index(a, loc), f"{a}.{loc}")
        for a, loc in task.errors
    ]

    stats = RunStats(explored=1)
    start = time.perf_counter()
    seq = itertools.count()

    initial = net.initial_state()
    if not net.invariants_hold((initial.locs, initial.clocks, initial.counters)):
        log.warning("Initial state violates an invariant, target unreachable")
        return INF, stats

    frontier: List[Tuple[int, int, NetworkState]] = [(0, next(seq), initial)]
    best = {initial: 0}
    closed = set()

    def _finish() -> RunStats:
        stats.stored = len(best) if dominance else len(closed) + len(frontier)
        stats.millis = (time.perf_counter() - start) * 1000.0
        return stats

    while frontier:
        stats.peak_frontier = max(stats.peak_frontier, len(frontier))
        cost, _, state = heapq.heappop(frontier)
        if dominance:
            if cost > best[state]:
                continue
        elif state in closed:
            continue

        if not dominance:
            closed.add(state)
        for e_idx, e_loc, e_name in errors:
            if state.locs[e_idx] == e_loc:
                _finish()
                raise ErrorLocationReached(
                    f"{e_name} reached at cost {cost}: {net.format_state(state)}"
                )
        if state.locs[a_idx] == loc_idx:
            log.debug("Target reached at cost %d: %s", cost, net.format_state(state))
            return cost, _finish()

        for succ, delta in successors(net, state):
            stats.explored += 1
            new_cost = cost + delta
            if dominance:
                if best.get(succ, INF) <= new_cost:
                    continue
                best[succ] = new_cost
            elif succ in closed:
                continue
            heapq.heappush(frontier, (new_cost, next(seq), succ))

        stored = len(best) if dominance else len(closed)
        if stored > task.state_budget:
            _finish()
            raise StateBudgetExceeded(
                f"State budget {task.state_budget} exceeded "
                f"after exploring {stats.explored} states",
                stats,
            )

    log.info("Target %s.%s unreachable", *task.target)
    return INF, _finish()


def _observed_task(args) -> TaskResult:
    system, spec, budget, keep_going = args
    network = Network(tuple(system) + (build_observer(spec),))
    # runs blocked by a full buffer would drop out of the minimum
    errors = ((PE, OVERFLOW),) if any(a.name == PE for a in system) else ()
    task = AnalysisTask(network, (spec.name, STOP), budget, errors)
    try:
        cost, stats = min_cost(task)
    except ErrorLocationReached as exc:
        raise BufferOverflow(
            f"{spec.variant.value}({spec.param}): request on a full buffer, "
            f"raise engine.max_backlog ({exc})"
        )
    except StateBudgetExceeded as exc:
        if not keep_going:
            raise
        # Costs are never negative so 0 is still a valid bound
        log.warning("%s(%d): %s", spec.variant.value, spec.param, exc)
        return TaskResult(spec.param, 0, exc.stats, exhausted=True)

    log.info("%s(%d) = %s", spec.variant.value, spec.param, format_bound(cost))
    return TaskResult(spec.param, cost, stats)


def _run_all(
    system: Sequence[Automaton],
    specs: Sequence[ObserverSpec],
    budget: int,
    jobs: int,
    keep_going: bool,
) -> List[TaskResult]:
    tasks = [(tuple(system), spec, budget, keep_going) for spec in specs]
    if jobs <= 1 or len(tasks) <= 1:
        return [_observed_task(t) for t in tasks]

    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(_observed_task, tasks))


def analyze_lower(
    system: Sequence[Automaton],
    n: int,
    state_budget: int = DEFAULT_STATE_BUDGET,
    jobs: int = 1,
    keep_going: bool = False,
) -> Tuple[Tuple[Bound, ...], List[TaskResult]]:
    """lower[K] for K = 1..n: least time between an output event and the K-th
    following one"""
    specs = [
        ObserverSpec(ObserverVariant.WINDOW_MIN, k, name=OBSERVER)
        for k in range(1, n + 1)
    ]
    results = _run_all(system, specs, state_budget, jobs, keep_going)
    return tuple(r.cost for r in results), results


def analyze_upper(
    system: Sequence[Automaton],
    horizon: int,
    n: int,
    state_budget: int = DEFAULT_STATE_BUDGET,
    jobs: int = 1,
    keep_going: bool = False,
) -> Tuple[Tuple[Bound, ...], List[TaskResult]]:
    """upper[K] for K = 1..n, the pseudo-inverse of the least number of output
    events in any window of length 0..horizon"""
    if horizon < 0:
        raise EngineError(f"Horizon must be >= 0, got {horizon}")

    specs = [
        ObserverSpec(ObserverVariant.COUNT_MIN, delta, name=OBSERVER)
        for delta in range(horizon + 1)
    ]
    results = _run_all(system, specs, state_budget, jobs, keep_going)

    # A window length no run lives long enough to observe bounds nothing
    counts = [n if r.cost == INF else int(r.cost) for r in results]
    counts = list(itertools.accumulate(counts, max))
    upper = pseudo_invert_upper(CountCurve(counts), n)
    missing = [k for k, up in enumerate(upper, start=1) if up == INF]
    if missing:
        log.warning(
            "Horizon %d too small for upper bounds at k=%s", horizon, missing
        )

    return upper, results


STATS_HEADER = ("K", "cost", "states_explored", "states_stored", "millis")


def stats_to_csv(results: Iterable[TaskResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STATS_HEADER)
    for r in results:
        writer.writerow(
            (
                r.param,
                format_bound(r.cost),
                r.stats.explored,
                r.stats.stored,
                f"{r.stats.millis:.1f}",
            )
        )
    return buf.getvalue()


def total_stats(results: Iterable[TaskResult]) -> RunStats:
    total = RunStats()
    for r in results:
        total = total + r.stats
    return total
