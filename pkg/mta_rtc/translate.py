"""Translation of curves and MTA models into timed automata.

The automata built here talk over a fixed set of channels:

* ``req``: one (coarse) input event, emitted by the input generator;
* ``serv``: one (coarse) service event, emitted by the service model (SM);
* ``produce``: one (coarse) output event, relayed by the processing element (PE);
* ``enter_<mode>``: mode switch, emitted or relayed by the PE and received by the SM;
* user sync channels of ``sync`` transitions, emitted by environment automata.
"""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from .automata import (
    Automaton,
    ClockBound,
    ClockDecl,
    ClockRef,
    Constraint,
    CounterBound,
    CounterDecl,
    CounterUpdate,
    Edge,
    Location,
    emit,
    receive,
)
from .curves import Bound, Curve, CurveError, sample, validate
from .mta import Mode, Mta, TransitionKind, coarse_thresholds, validate_mta

log = logging.getLogger(__name__)

REQ = "req"
SERV = "serv"
PRODUCE = "produce"
RESERVED_CHANNELS = (REQ, SERV, PRODUCE)

STOP = "Stop"

PE = "PE"
# PE sink entered by a request arriving on a full buffer
OVERFLOW = "Overflow"


class TranslationError(Exception):
    """Model cannot be translated"""


def enter_channel(mode: str) -> str:
    return f"enter_{mode}"


@dataclass(frozen=True)
class GeneratorSpec:
    curve: Curve
    channel: str
    name: str = "Generator"


class ObserverVariant(Enum):
    WINDOW_MIN = "window_min"
    COUNT_MIN = "count_min"


@dataclass(frozen=True)
class ObserverSpec:
    """``param`` is the event count K for window_min and the window length for
    count_min"""

    variant: ObserverVariant
    param: int
    channel: str = PRODUCE
    name: str = "Observer"


# Generators

_Y, _LAMBDA, _THETA = "y", "lam", "theta"


def _generator_constraints(
    curve: Curve,
) -> Tuple[Tuple[Constraint, ...], Tuple[Constraint, ...]]:
    """(invariant, guard) over the last theta events recorded in y"""
    invariant: List[Constraint] = []
    guard: List[Constraint] = []
    for i in range(1, curve.n + 1):
        lo, up = curve.point(i)
        ref = ClockRef(_Y, _LAMBDA, i)
        active = CounterBound(_THETA, ">=", i)
        if not math.isinf(up):
            invariant.append(ClockBound(ref, "<=", up, active))
        if lo > 0:
            guard.append(ClockBound(ref, ">=", lo, active))

    return tuple(invariant), tuple(guard)


def _history_decls(size: int, depth: int):
    clocks = (ClockDecl(_Y, size),)
    counters = (
        CounterDecl(_LAMBDA, 0, size - 1, initial=1 % size),
        CounterDecl(_THETA, 1, depth, initial=1),
    )
    return clocks, counters


def _record_event(size: int, depth: int):
    """Resets and updates that push the current instant onto the history"""
    resets = (ClockRef(_Y, _LAMBDA, 0),)
    updates = (
        CounterUpdate(_LAMBDA, delta=1, modulo=size),
        CounterUpdate(_THETA, delta=1, saturate=depth),
    )
    return resets, updates


def _restart(size: int, extra_resets: Tuple[ClockRef, ...] = ()):
    """Forget the history; the current instant becomes the only recorded event"""
    resets = tuple(ClockRef(_Y, None, j) for j in range(size)) + extra_resets
    updates = (
        CounterUpdate(_LAMBDA, assign=1 % size),
        CounterUpdate(_THETA, assign=1),
    )
    return resets, updates


def build_generator(spec: GeneratorSpec) -> Automaton:
    """Single-location generator of every integer stream conforming to the curve.

    The clock array y records the instants of the last N events, y[(lam - i) mod N]
    being the i-th most recent one. The origin counts as the first recorded event.
    """
    violation = validate(spec.curve)
    if violation is not None:
        raise TranslationError(f"{spec.name}: invalid curve at k={violation}")
    if spec.curve.n < 1:
        raise TranslationError(f"{spec.name}: curve has no points")

    n = spec.curve.n
    invariant, guard = _generator_constraints(spec.curve)
    resets, updates = _record_event(n, n)
    clocks, counters = _history_decls(n, n)
    return Automaton(
        name=spec.name,
        locations=(Location("Gen", invariant),),
        edges=(
            Edge("Gen", "Gen", guard, emit(spec.channel), (), resets, updates),
        ),
        initial="Gen",
        clocks=clocks,
        counters=counters,
    )


def build_environment(channel: str, curve: Optional[Curve] = None) -> Automaton:
    """Source of a sync channel: free (any instant, any number of times) or
    constrained by a curve"""
    name = f"Env_{channel}"
    if curve is not None:
        return build_generator(GeneratorSpec(curve, channel, name))

    return Automaton(
        name=name,
        locations=(Location("Env"),),
        edges=(Edge("Env", "Env", sync=emit(channel)),),
        initial="Env",
    )


def _script_locations(times: Sequence[int]) -> List[str]:
    return [f"W{j}" for j in range(len(times))] + ["Done"]


def _check_times(times: Sequence[int]) -> None:
    if any(t < 0 for t in times) or list(times) != sorted(times):
        raise TranslationError(
            f"Scripted times must be non-negative and sorted: {times}"
        )


def build_scripted(
    times: Sequence[int], channel: str, name: str = "Script"
) -> Automaton:
    """Emits channel exactly at the given instants, then falls silent"""
    _check_times(times)
    names = _script_locations(times)
    clock = ClockRef("c")
    locations = [
        Location(names[j], (ClockBound(clock, "<=", t),)) for j, t in enumerate(times)
    ]
    locations.append(Location("Done"))
    edges = tuple(
        Edge(names[j], names[j + 1], (ClockBound(clock, "==", t),), emit(channel))
        for j, t in enumerate(times)
    )
    return Automaton(name, tuple(locations), edges, names[0], (ClockDecl("c"),))


def build_trace_checker(
    times: Sequence[int], channel: str, name: str = "Checker"
) -> Automaton:
    """Accepts channel exactly at the given instants, in order, and anything
    afterwards; reaching ``Done`` proves the run produced that prefix"""
    _check_times(times)
    names = _script_locations(times)
    clock = ClockRef("c")
    locations = [
        Location(names[j], (ClockBound(clock, "<=", t),)) for j, t in enumerate(times)
    ]
    locations.append(Location("Done"))
    edges = [
        Edge(names[j], names[j + 1], (ClockBound(clock, "==", t),), receive(channel))
        for j, t in enumerate(times)
    ]
    edges.append(Edge("Done", "Done", sync=receive(channel)))
    return Automaton(name, tuple(locations), tuple(edges), names[0], (ClockDecl("c"),))


# Observers


def _window_min(spec: ObserverSpec) -> Automaton:
    k = spec.param
    ch = receive(spec.channel)
    t = ClockRef("t")
    edges = [
        Edge("Idle", "Idle", sync=ch),
        Edge(STOP, STOP, sync=ch),
    ]
    if k == 0:
        edges.append(Edge("Idle", STOP))
    else:
        eta = "eta"
        edges += [
            # window opening at the origin or at an observed event
            Edge("Idle", "Counting", (ClockBound(t, "==", 0),)),
            Edge("Idle", "Counting", sync=ch),
            Edge(
                "Counting",
                "Counting",
                (CounterBound(eta, "<=", k - 2),),
                ch,
                updates=(CounterUpdate(eta, delta=1),),
            ),
            Edge("Counting", STOP, (CounterBound(eta, "==", k - 1),), ch),
        ]

    return Automaton(
        name=spec.name,
        locations=(
            Location("Idle"),
            Location("Counting", cost_rate=1),
            Location(STOP),
        ),
        edges=tuple(edges),
        initial="Idle",
        clocks=(ClockDecl("t"),),
        counters=(CounterDecl("eta", 0, max(k, 1)),),
    )


def _count_min(spec: ObserverSpec) -> Automaton:
    # Counting lasts delta + 1 time units; the events at both ends may be left out,
    # so the cheapest run counts the events of a half-open window of length delta
    end = spec.param + 1
    ch = receive(spec.channel)
    t = ClockRef("t")
    return Automaton(
        name=spec.name,
        locations=(
            Location("Idle"),
            Location("Counting", (ClockBound(t, "<=", end),)),
            Location(STOP),
        ),
        edges=(
            Edge("Idle", "Idle", sync=ch),
            Edge("Idle", "Counting", resets=(t,)),
            Edge("Counting", "Counting", sync=ch, cost=1),
            Edge("Counting", STOP, (ClockBound(t, "==", end),)),
            Edge(STOP, STOP, sync=ch),
        ),
        initial="Idle",
        clocks=(ClockDecl("t"),),
    )


def build_observer(spec: ObserverSpec) -> Automaton:
    """Observer whose minimum cost to reach ``Stop`` is the shortest window
    spanning K events (window_min) or the fewest events in a window of the given
    length (count_min)"""
    if spec.param < 0:
        raise TranslationError(f"Observer parameter must be >= 0, got {spec.param}")

    if spec.variant is ObserverVariant.WINDOW_MIN:
        return _window_min(spec)
    return _count_min(spec)


# PMC models

_X, _Q = ClockRef("x"), "q"


def _check_model(m: Mta) -> None:
    violation = validate_mta(m)
    if violation is not None:
        raise TranslationError(f"Invalid model: {violation}")

    if any(mode.name == OVERFLOW for mode in m.modes):
        raise TranslationError(f"Mode name {OVERFLOW!r} is reserved")

    for channel in m.channels:
        if channel in RESERVED_CHANNELS or channel.startswith("enter_"):
            raise TranslationError(f"Channel name {channel!r} is reserved")


def _range(counter: str, low: Bound, high: Bound) -> Tuple[CounterBound, ...]:
    bounds = []
    if not math.isinf(low):
        bounds.append(CounterBound(counter, ">=", low))
    if not math.isinf(high):
        bounds.append(CounterBound(counter, "<=", high))
    return tuple(bounds)


def _dwell_invariant(mode: Mode) -> Tuple[Constraint, ...]:
    upper = mode.effective_dwell_max
    return () if math.isinf(upper) else (ClockBound(_X, "<=", upper),)


def _switch(
    source: str,
    target: str,
    guard: Tuple[Constraint, ...] = (),
    on: Optional[str] = None,
    relay: Tuple[str, ...] = (),
    updates: Tuple[CounterUpdate, ...] = (),
) -> Edge:
    """PE edge entering mode target; signalled to the SM in the same step"""
    enter = enter_channel(target)
    if on is None:
        return Edge(source, target, guard, emit(enter), (), (_X,), updates)
    return Edge(
        source, target, guard, receive(on), relay + (enter,), (_X,), updates
    )


_INC = (CounterUpdate(_Q, delta=1),)
_DEC = (CounterUpdate(_Q, delta=-1),)


def _buffer_edges(source: str, target: str) -> List[Edge]:
    """req/serv handling that keeps the PE in its mode"""
    return [
        Edge(source, target, sync=receive(REQ), updates=_INC),
        Edge(
            source,
            target,
            (CounterBound(_Q, ">=", 1),),
            receive(SERV),
            relay=(PRODUCE,),
            updates=_DEC,
        ),
    ]


def _common_exits(
    mode: Mode, states: Sequence[str], timed: Sequence[str]
) -> List[Edge]:
    """Sync exits from every state, timeout exits from the dwell-bounded ones"""
    edges = []
    for trans in mode.transitions:
        if trans.kind is TransitionKind.SYNC:
            edges += [_switch(s, trans.target, on=trans.channel) for s in states]

    timeout = mode.transition(TransitionKind.TIMEOUT)
    if timeout is not None:
        guard = (ClockBound(_X, "==", mode.dwell_max),)
        edges += [_switch(s, timeout.target, guard) for s in timed]
    return edges


def _entry_state(mode: Mode) -> Tuple[Location, List[Edge]]:
    """Entry state: the mode is entered and stays at least dwell_min"""
    name = mode.name
    loc = Location(name, (ClockBound(_X, "<=", mode.dwell_min),))
    edges = _buffer_edges(name, name)
    edges.append(Edge(name, name, (CounterBound(_Q, "==", 0),), receive(SERV)))
    return loc, edges


def _fine_pe_mode(mode: Mode) -> Tuple[List[Location], List[Edge]]:
    name, s1 = mode.name, f"{mode.name}_1"
    above = mode.transition(TransitionKind.BUFFER_ABOVE)
    below = mode.transition(TransitionKind.BUFFER_BELOW)
    high, low = mode.effective_high, mode.effective_low
    at_l = ClockBound(_X, "==", mode.dwell_min)

    entry, edges = _entry_state(mode)
    band = Location(s1, _dwell_invariant(mode) + _range(_Q, low, high))

    edges.append(Edge(name, s1, (at_l,) + _range(_Q, low, high)))
    if above is not None:
        edges.append(_switch(name, above.target, (at_l, CounterBound(_Q, ">", high))))
    if below is not None:
        edges.append(_switch(name, below.target, (at_l, CounterBound(_Q, "<", low))))

    if above is None:
        edges.append(Edge(s1, s1, sync=receive(REQ), updates=_INC))
    else:
        edges += [
            Edge(s1, s1, (CounterBound(_Q, "<", high),), receive(REQ), updates=_INC),
            _switch(s1, above.target, (CounterBound(_Q, "==", high),), REQ, (), _INC),
        ]

    keep = (CounterBound(_Q, ">=", 1),)
    if below is not None:
        keep += (CounterBound(_Q, ">", low),)
        edges.append(
            _switch(
                s1,
                below.target,
                (CounterBound(_Q, ">=", 1), CounterBound(_Q, "==", low)),
                SERV,
                (PRODUCE,),
                _DEC,
            )
        )
    edges += [
        Edge(s1, s1, keep, receive(SERV), relay=(PRODUCE,), updates=_DEC),
        Edge(s1, s1, (CounterBound(_Q, "==", 0),), receive(SERV)),
    ]

    edges += _common_exits(mode, (name, s1), (s1,))
    return [entry, band], edges


def _coarse_pe_mode(mode: Mode, g: int) -> Tuple[List[Location], List[Edge]]:
    name = mode.name
    above = mode.transition(TransitionKind.BUFFER_ABOVE)
    below = mode.transition(TransitionKind.BUFFER_BELOW)
    th = coarse_thresholds(mode.effective_low, mode.effective_high, g)
    at_l = ClockBound(_X, "==", mode.dwell_min)
    dwell = _dwell_invariant(mode)

    # _1: fine backlog within [b_low, b_high]; _inc / _dec: the fine threshold
    # may already have been crossed
    bands = {f"{name}_1": (th.h_high + 1, th.y_low - 1)}
    if above is not None:
        bands[f"{name}_inc"] = (th.y_low, th.y_high)
    if below is not None:
        bands[f"{name}_dec"] = (th.h_low, th.h_high)

    entry, edges = _entry_state(mode)
    locations = [entry]
    for band, (low, high) in bands.items():
        locations.append(Location(band, dwell + _range(_Q, low, high)))
        edges.append(Edge(name, band, (at_l,) + _range(_Q, low, high)))
        edges.append(Edge(band, band, (CounterBound(_Q, "==", 0),), receive(SERV)))
        # the target's invariant selects the band the new backlog falls in
        for target in bands:
            edges += _buffer_edges(band, target)

    if above is not None:
        edges.append(
            _switch(name, above.target, (at_l, CounterBound(_Q, ">", th.y_high)))
        )
        edges.append(_switch(f"{name}_inc", above.target))
    if below is not None:
        edges.append(
            _switch(name, below.target, (at_l, CounterBound(_Q, "<", th.h_low)))
        )
        edges.append(_switch(f"{name}_dec", below.target))

    edges += _common_exits(mode, [name, *bands], list(bands))
    return locations, edges


def _overflow_edges(edges: Sequence[Edge], q_max: int) -> List[Edge]:
    """One edge into Overflow per state receiving req, taken on a full buffer"""
    sources = sorted({e.source for e in edges if e.sync == receive(REQ)})
    full = (CounterBound(_Q, "==", q_max),)
    return [Edge(s, OVERFLOW, full, receive(REQ)) for s in sources]


def _pe(m: Mta, per_mode, q_initial: int, q_max: int, *args) -> Automaton:
    locations: List[Location] = []
    edges: List[Edge] = []
    for mode in m.modes:
        mode_locs, mode_edges = per_mode(mode, *args)
        locations += mode_locs
        edges += mode_edges

    locations.append(Location(OVERFLOW))
    edges += _overflow_edges(edges, q_max)

    return Automaton(
        name=PE,
        locations=tuple(locations),
        edges=tuple(edges),
        initial=m.initial,
        clocks=(ClockDecl("x"),),
        counters=(CounterDecl(_Q, 0, q_max, initial=q_initial),),
    )


def _sm(m: Mta, services: Sequence[Optional[Curve]], g: int) -> Automaton:
    """Service model: one generator per mode restarted on every mode entry.

    At g > 1 each mode is entered through a transient state whose first coarse
    event comes between the first fine service bound and the g-th one.
    """
    size = max((c.n for c in services if c is not None), default=1)
    z = ClockRef("z")
    clocks, counters = _history_decls(size, size)
    if g > 1:
        clocks += (ClockDecl("z"),)

    locations: List[Location] = []
    edges: List[Edge] = []
    entry_of = {}
    for mode, curve in zip(m.modes, services):
        entry_of[mode.name] = mode.name
        if curve is None:
            locations.append(Location(mode.name))
            continue

        invariant, guard = _generator_constraints(curve)
        locations.append(Location(mode.name, invariant))
        resets, updates = _record_event(size, curve.n)
        edges.append(
            Edge(mode.name, mode.name, guard, emit(SERV), (), resets, updates)
        )

        if g > 1:
            fine = mode.service
            trans = f"{mode.name}_trans"
            entry_of[mode.name] = trans
            first_low, _ = fine.point(1)
            _, g_up = fine.point(g)
            stay = () if math.isinf(g_up) else (ClockBound(z, "<=", g_up),)
            locations.append(Location(trans, stay))
            resets, updates = _restart(size)
            edges.append(
                Edge(
                    trans,
                    mode.name,
                    (ClockBound(z, ">=", first_low),),
                    emit(SERV),
                    (),
                    resets,
                    updates,
                )
            )

    extra = (z,) if g > 1 else ()
    resets, updates = _restart(size, extra)
    for loc in list(locations):
        for mode in m.modes:
            edges.append(
                Edge(
                    loc.name,
                    entry_of[mode.name],
                    sync=receive(enter_channel(mode.name)),
                    resets=resets,
                    updates=updates,
                )
            )

    return Automaton(
        name="SM",
        locations=tuple(locations),
        edges=tuple(edges),
        initial=entry_of[m.initial],
        clocks=clocks,
        counters=counters,
    )


def build_fine(m: Mta, max_backlog: int = 16) -> Tuple[Automaton, Automaton]:
    """PE and SM of the model at fine granularity"""
    _check_model(m)
    if m.initial_backlog > max_backlog:
        raise TranslationError(
            f"initial_backlog {m.initial_backlog} exceeds max_backlog {max_backlog}"
        )

    pe = _pe(m, _fine_pe_mode, m.initial_backlog, max_backlog)
    sm = _sm(m, [mode.service for mode in m.modes], 1)
    log.debug("Fine model: %d PE locations", len(pe.locations))
    return pe, sm


def build_coarse(m: Mta, g: int, max_backlog: int = 16) -> Tuple[Automaton, Automaton]:
    """PE and SM of the model consuming and producing coarse events of size g"""
    _check_model(m)
    if g < 1:
        raise TranslationError(f"Granularity must be >= 1, got {g}")

    if m.initial_backlog % g:
        raise TranslationError(
            f"initial_backlog {m.initial_backlog} is not a multiple of g={g}"
        )

    try:
        services = [
            None if mode.service is None else sample(mode.service, g)
            for mode in m.modes
        ]
    except CurveError as exc:
        raise TranslationError(f"Cannot sample service curves at g={g}: {exc}")

    q_max = -(-max_backlog // g) + 1
    pe = _pe(m, _coarse_pe_mode, m.initial_backlog // g, q_max, g)
    sm = _sm(m, services, g)
    log.debug("Coarse model g=%d: %d PE locations", g, len(pe.locations))
    return pe, sm
