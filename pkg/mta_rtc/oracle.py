"""Brute-force ground truth for small models.

Executes the operational semantics of an MTA directly (no automata involved) over
every conforming integer input stream and every resolution of the model's
non-determinism, and reads exact output bounds off the resulting runs.

Within one instant the enabled actions are, in this order:

``arrive``  the next input event is consumed (``q += 1``), a full buffer raises
            OracleBoundsError;
``dwell``   the minimum dwell time has elapsed and the mode is checked against its
            thresholds;
``timeout`` the maximum dwell time has elapsed;
``serve``   a service event (produces an output when ``q > 0``);
``wait``    time advances by one unit;
``sync``    a sync transition fires (channels are free, any instant).

Every run is a path of such actions; ``run_mta`` replays one path from a choice
vector, the exhaustive driver explores them all.
"""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import (
    Dict,
    FrozenSet,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import numpy as np

from .curves import (
    INF,
    Bound,
    CountCurve,
    Curve,
    pseudo_invert_upper,
    validate,
)
from .mta import Mode, Mta, TransitionKind, validate_mta
from .streams import EventStream, conforms

log = logging.getLogger(__name__)

MAX_EVENTS_LIMIT = 8
MAX_HORIZON = 40
DEFAULT_CARDINALITY_CAP = 100_000
MAX_RUN_STEPS = 100_000


class OracleError(Exception):
    """Base error for the oracle"""


class OracleBoundsError(OracleError):
    """Configuration outside the tractable range"""


@dataclass(frozen=True)
class OracleConfig:
    mta: Mta
    arrival: Curve
    max_events: int
    horizon: int
    max_backlog: int = 16
    cardinality_cap: int = DEFAULT_CARDINALITY_CAP
    channels: Mapping[str, Optional[Curve]] = field(default_factory=dict)


def check_bounds(config: OracleConfig) -> None:
    """Raise OracleBoundsError naming the first bound the config violates"""
    if not 1 <= config.max_events <= MAX_EVENTS_LIMIT:
        raise OracleBoundsError(
            f"max_events={config.max_events} outside [1, {MAX_EVENTS_LIMIT}]"
        )

    if not 1 <= config.horizon <= MAX_HORIZON:
        raise OracleBoundsError(f"horizon={config.horizon} outside [1, {MAX_HORIZON}]")

    curves = [config.arrival]
    curves += [m.service for m in config.mta.modes if m.service is not None]
    largest = max(c.max_constant() for c in curves)
    if config.horizon < largest:
        raise OracleBoundsError(
            f"horizon={config.horizon} is below the largest curve constant {largest}"
        )

    constrained = sorted(ch for ch, c in config.channels.items() if c is not None)
    if constrained:
        raise OracleError(
            f"Sync channels driven by curves are unsupported: {constrained}"
        )


# Input streams


def _next_window(times: Sequence[int], c: Curve) -> Tuple[Bound, Bound]:
    """[earliest, latest] instant of the event following times"""
    earliest: Bound = times[-1]
    latest: Bound = INF
    for k in range(1, min(c.n, len(times)) + 1):
        lo, up = c.point(k)
        earliest = max(earliest, times[-k] + lo)
        latest = min(latest, times[-k] + up)
    return earliest, latest


def _prefixes(c: Curve, max_events: int, horizon: int) -> Iterator[Tuple[int, ...]]:
    """Every conforming stream with at most max_events timestamps in [0, horizon]"""
    stack = [(0,)]
    while stack:
        times = stack.pop()
        yield times
        if len(times) == max_events:
            continue
        earliest, latest = _next_window(times, c)
        last = min(latest, horizon)
        if earliest > last:
            continue
        for t in range(int(last), int(earliest) - 1, -1):
            stack.append(times + (t,))


def enumerate_conforming(
    c: Curve,
    max_events: int,
    horizon: int,
    cap: int = DEFAULT_CARDINALITY_CAP,
) -> FrozenSet[EventStream]:
    """All integer streams of exactly max_events timestamps, origin included,
    within [0, horizon] and conforming to c"""
    violation = validate(c)
    if violation is not None:
        raise OracleError(f"Invalid curve at k={violation}")
    if max_events > MAX_EVENTS_LIMIT:
        raise OracleBoundsError(f"max_events={max_events} exceeds {MAX_EVENTS_LIMIT}")

    found: Set[EventStream] = set()
    for times in _prefixes(c, max_events, horizon):
        if len(times) != max_events:
            continue
        found.add(EventStream(times))
        if len(found) > cap:
            raise OracleBoundsError(f"More than {cap} conforming streams")

    return frozenset(found)


def _input_streams(config: OracleConfig) -> List[Tuple[Tuple[int, ...], int]]:
    """(stream, time limit) pairs: streams a generator can produce up to the limit"""
    runs = []
    for times in _prefixes(config.arrival, config.max_events, config.horizon):
        earliest, latest = _next_window(times, config.arrival)
        if latest >= config.horizon:
            runs.append((times, config.horizon))
        elif len(times) == config.max_events or earliest > latest:
            runs.append((times, int(latest)))
        if len(runs) > config.cardinality_cap:
            raise OracleBoundsError(
                f"More than {config.cardinality_cap} input streams"
            )
    return sorted(runs)


def extendable(s: EventStream, c: Curve) -> bool:
    """True iff s conforms to c and some infinite stream extending s conforms"""
    if not conforms(s, c):
        return False

    cap = c.max_constant() + 1
    depth = max(c.n - 1, 0)

    def _step(dists: Tuple[int, ...]) -> List[Tuple[int, ...]]:
        # dists[i] is the distance from the last event back to the (i+1)-th before
        earliest, latest = 0, INF
        for k in range(1, min(c.n, len(dists) + 1) + 1):
            back = 0 if k == 1 else dists[k - 2]
            lo, up = c.point(k)
            earliest = max(earliest, lo - back)
            latest = min(latest, up - back)
        if earliest > latest or math.isinf(earliest):
            return []
        top = int(min(latest, max(earliest, cap)))
        succs = set()
        for delta in range(int(earliest), top + 1):
            moved = (delta,) + tuple(d + delta for d in dists)
            succs.add(tuple(min(d, cap) for d in moved[:depth]))
        return sorted(succs)

    t = s.times
    start = tuple(min(t[-1] - t[-1 - i], cap) for i in range(1, min(depth, s.m) + 1))

    graph: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    todo = [start]
    while todo:
        node = todo.pop()
        if node in graph:
            continue
        graph[node] = _step(node)
        todo.extend(graph[node])

    alive = set(graph)
    changed = True
    while changed:
        changed = False
        for node in list(alive):
            if not any(succ in alive for succ in graph[node]):
                alive.discard(node)
                changed = True

    return start in alive


# Direct MTA semantics


@dataclass(frozen=True)
class _Config:
    t: int
    mode: int
    settled: bool
    x: int
    q: int
    served: Tuple[int, ...]
    fed: int
    outputs: Tuple[int, ...]
    trace: Tuple[Tuple[int, str], ...] = field(compare=False, default=())


class _Semantics:
    def __init__(self, m: Mta, arrivals: Sequence[int], limit: int, max_backlog: int):
        self.m = m
        self.arrivals = tuple(arrivals)
        self.limit = limit
        self.max_backlog = max_backlog

    def initial(self) -> _Config:
        return _Config(
            t=0,
            mode=self.m.mode_index(self.m.initial),
            settled=False,
            x=0,
            q=self.m.initial_backlog,
            served=(0,),
            fed=0,
            outputs=(0,),
            trace=((0, self.m.initial),),
        )

    def _switch(self, cfg: _Config, target: str, **changes) -> _Config:
        return replace(
            cfg,
            mode=self.m.mode_index(target),
            settled=False,
            x=0,
            served=(cfg.t,),
            trace=cfg.trace + ((cfg.t, target),),
            **changes,
        )

    def _service_window(self, mode: Mode, cfg: _Config) -> Tuple[Bound, Bound]:
        return _next_window(cfg.served, mode.service)

    def actions(self, cfg: _Config) -> List[Tuple[str, _Config]]:
        mode = self.m.modes[cfg.mode]
        high, low = mode.effective_high, mode.effective_low
        above = mode.transition(TransitionKind.BUFFER_ABOVE)
        below = mode.transition(TransitionKind.BUFFER_BELOW)
        timeout = mode.transition(TransitionKind.TIMEOUT)
        result: List[Tuple[str, _Config]] = []

        pending = cfg.fed < len(self.arrivals) and self.arrivals[cfg.fed] == cfg.t
        if pending and cfg.q >= self.max_backlog:
            raise OracleBoundsError(
                f"Request at t={cfg.t} on a full buffer (max_backlog "
                f"{self.max_backlog})"
            )
        if pending:
            fed = replace(cfg, q=cfg.q + 1, fed=cfg.fed + 1)
            if cfg.settled and above is not None and cfg.q == high:
                fed = self._switch(fed, above.target)
            result.append(("arrive", fed))

        if not cfg.settled and cfg.x == mode.dwell_min:
            if low <= cfg.q <= high:
                result.append(("dwell", replace(cfg, settled=True)))
            elif cfg.q > high:
                result.append(("dwell", self._switch(cfg, above.target)))
            else:
                result.append(("dwell", self._switch(cfg, below.target)))

        if cfg.settled and timeout is not None and cfg.x == mode.dwell_max:
            result.append(("timeout", self._switch(cfg, timeout.target)))

        idle_serve = None
        if mode.service is not None:
            earliest, _ = self._service_window(mode, cfg)
            if earliest <= cfg.t:
                served = (cfg.served + (cfg.t,))[-mode.service.n :]
                if cfg.q == 0:
                    idle_serve = ("serve", replace(cfg, served=served))
                else:
                    done = replace(
                        cfg, q=cfg.q - 1, served=served, outputs=cfg.outputs + (cfg.t,)
                    )
                    if cfg.settled and below is not None and cfg.q == low:
                        done = self._switch(done, below.target)
                    result.append(("serve", done))

        if self._can_wait(mode, cfg):
            result.append(("wait", replace(cfg, t=cfg.t + 1, x=cfg.x + 1)))

        if idle_serve is not None:
            result.append(idle_serve)

        for trans in mode.transitions:
            if trans.kind is TransitionKind.SYNC:
                result.append(("sync", self._switch(cfg, trans.target)))

        return result

    def _can_wait(self, mode: Mode, cfg: _Config) -> bool:
        if cfg.t >= self.limit:
            return False
        if cfg.fed < len(self.arrivals) and self.arrivals[cfg.fed] <= cfg.t:
            return False
        dwell = mode.effective_dwell_max if cfg.settled else mode.dwell_min
        if cfg.x + 1 > dwell:
            return False
        if mode.service is not None:
            _, latest = self._service_window(mode, cfg)
            if cfg.t + 1 > latest:
                return False
        return True


class OracleRun(NamedTuple):
    output: EventStream
    modes: Tuple[Tuple[int, str], ...]
    end: int


def run_mta(
    m: Mta,
    input_stream: EventStream,
    choices: Sequence[int] = (),
    horizon: int = MAX_HORIZON,
    max_backlog: int = 16,
) -> OracleRun:
    """Replay one run: at every instant with several enabled actions the next
    entry of choices picks one (by position in the documented order).

    Once choices are exhausted the first enabled action is taken, and the run
    ends when the horizon is reached.
    """
    violation = validate_mta(m)
    if violation is not None:
        raise OracleError(f"Invalid model: {violation}")

    sem = _Semantics(m, input_stream.times[1:], horizon, max_backlog)
    cfg = sem.initial()
    pending = list(choices)
    for _ in range(MAX_RUN_STEPS):
        options = sem.actions(cfg)
        if not options or (not pending and cfg.t >= horizon):
            break
        if len(options) == 1 or not pending:
            _, cfg = options[0]
            continue
        choice = pending.pop(0)
        if not 0 <= choice < len(options):
            raise OracleError(
                f"Choice {choice} at t={cfg.t} not enabled, "
                f"options are {[label for label, _ in options]}"
            )
        _, cfg = options[choice]
    else:
        raise OracleError(f"Run did not end within {MAX_RUN_STEPS} steps")

    return OracleRun(EventStream(cfg.outputs), cfg.trace, cfg.t)


@dataclass
class _Extremes:
    """Window extremes seen over a set of runs"""

    n: int
    deltas: int
    lower: List[Bound] = field(init=False)
    counts: List[Bound] = field(init=False)
    behaviours: Set[Tuple[Tuple[int, ...], Tuple[int, ...]]] = field(
        default_factory=set
    )

    def __post_init__(self) -> None:
        self.lower = [INF] * self.n
        self.counts = [INF] * (self.deltas + 1)

    def merge(self, other: "_Extremes") -> None:
        self.lower = [min(a, b) for a, b in zip(self.lower, other.lower)]
        self.counts = [min(a, b) for a, b in zip(self.counts, other.counts)]
        self.behaviours |= other.behaviours


def _explore(args) -> _Extremes:
    config, times, limit, deltas, n, keep = args
    sem = _Semantics(config.mta, times[1:], limit, config.max_backlog)
    result = _Extremes(n, deltas)
    seen: Set[_Config] = set()
    stack = [sem.initial()]
    while stack:
        cfg = stack.pop()
        if cfg in seen:
            continue
        seen.add(cfg)
        if len(seen) > config.cardinality_cap * 10:
            raise OracleBoundsError("Too many configurations for one input stream")

        for label, nxt in sem.actions(cfg):
            if len(nxt.outputs) > len(cfg.outputs):
                out = nxt.outputs
                last = len(out) - 1
                for k in range(1, min(n, last) + 1):
                    gap = out[last] - out[last - k]
                    result.lower[k - 1] = min(result.lower[k - 1], gap)
            if label == "wait":
                _count_windows(result, cfg)
                if keep:
                    result.behaviours.add((times[: cfg.fed + 1], cfg.outputs))
            stack.append(nxt)

    return result


def _count_windows(result: _Extremes, cfg: _Config) -> None:
    """Windows (s, s + delta] with s + delta = t, final once time moves on"""
    outputs = np.asarray(cfg.outputs[1:], dtype=np.int64)
    for delta in range(min(result.deltas, cfg.t) + 1):
        start = cfg.t - delta
        count = int(np.count_nonzero((outputs > start) & (outputs <= cfg.t)))
        result.counts[delta] = min(result.counts[delta], count)


def _exhaust(
    config: OracleConfig, n: int, keep: bool = False, jobs: int = 1
) -> _Extremes:
    check_bounds(config)
    violation = validate_mta(config.mta)
    if violation is not None:
        raise OracleError(f"Invalid model: {violation}")

    deltas = config.horizon - 1
    tasks = [
        (config, times, limit, deltas, n, keep)
        for times, limit in _input_streams(config)
    ]
    log.info("Oracle: %d input streams", len(tasks))

    total = _Extremes(n, deltas)
    if jobs <= 1:
        partials = map(_explore, tasks)
        for part in partials:
            total.merge(part)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            for part in executor.map(_explore, tasks):
                total.merge(part)
    return total


def exact_output_curve(config: OracleConfig, n: int, jobs: int = 1) -> Curve:
    """Exact output bounds over every behaviour within the oracle horizon.

    ``lower[k]`` is the least distance between an output and the k-th following one;
    ``upper[k]`` the pseudo-inverse of the least number of outputs in any window of
    length up to ``horizon - 1``, the sentinel when no such window is long enough.
    """
    extremes = _exhaust(config, n, jobs=jobs)
    counts = [n if math.isinf(c) else int(c) for c in extremes.counts]
    running = list(np.maximum.accumulate(np.asarray(counts, dtype=np.int64)))
    upper = pseudo_invert_upper(CountCurve(running), n)
    return Curve(extremes.lower, upper)


def behaviours(
    config: OracleConfig, jobs: int = 1
) -> FrozenSet[Tuple[EventStream, EventStream]]:
    """(input prefix, output prefix) pairs observed whenever time advances"""
    extremes = _exhaust(config, 1, keep=True, jobs=jobs)
    return frozenset(
        (EventStream(inputs), EventStream(outputs))
        for inputs, outputs in extremes.behaviours
    )
