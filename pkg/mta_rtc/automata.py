"""Timed automata with integer-time semantics.

Automata carry integer clocks (scalars and circular arrays), bounded counters,
binary rendezvous channels and cost rates. A :class:`Network` is the synchronised
product of several automata; :func:`successors` enumerates its one-step
successors.

Semantics
---------
* Time advances in unit steps. Every clock is capped at one above the largest
  finite constant it is compared with, which leaves every guard and invariant
  unchanged and keeps the state space finite.
* A discrete step starts with an internal or emitting edge. Every channel it emits
  or relays is then delivered, depth first and in order, to one enabled receiving
  edge of an automaton other than the sender. Receiving edges may relay further
  channels within the same step.
* Location invariants and counter bounds are checked on the state reached after
  the whole step and after each time step.
"""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import logging
import math
import operator
from dataclasses import dataclass, field
from typing import (
    Callable,
    Dict,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .curves import Bound, format_bound

log = logging.getLogger(__name__)

OPS: Dict[str, Callable[[int, Bound], bool]] = {
    "<=": operator.le,
    ">=": operator.ge,
    "==": operator.eq,
    "<": operator.lt,
    ">": operator.gt,
}

MAX_RELAY_DEPTH = 16


class AutomatonError(Exception):
    """Malformed automaton or network"""


@dataclass(frozen=True)
class ClockRef:
    """A scalar clock, or element ``(counter - offset) mod size`` of a clock array.

    Without an index counter, ``offset`` is the array position itself.
    """

    clock: str
    index: Optional[str] = None
    offset: int = 0


@dataclass(frozen=True)
class CounterBound:
    counter: str
    op: str
    value: Bound


@dataclass(frozen=True)
class ClockBound:
    """Clock constraint, only checked while ``active_if`` holds (if given)"""

    ref: ClockRef
    op: str
    value: Bound
    active_if: Optional[CounterBound] = None


Constraint = Union[ClockBound, CounterBound]


@dataclass(frozen=True)
class CounterUpdate:
    """``counter := assign`` or ``counter += delta``, then optional modulo and
    saturation"""

    counter: str
    delta: int = 0
    assign: Optional[int] = None
    modulo: Optional[int] = None
    saturate: Optional[int] = None


@dataclass(frozen=True)
class Sync:
    channel: str
    emit: bool

    def __str__(self) -> str:
        return f"{self.channel}{'!' if self.emit else '?'}"


def emit(channel: str) -> Sync:
    return Sync(channel, True)


def receive(channel: str) -> Sync:
    return Sync(channel, False)


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    guard: Tuple[Constraint, ...] = ()
    sync: Optional[Sync] = None
    relay: Tuple[str, ...] = ()
    resets: Tuple[ClockRef, ...] = ()
    updates: Tuple[CounterUpdate, ...] = ()
    cost: int = 0


@dataclass(frozen=True)
class Location:
    name: str
    invariant: Tuple[Constraint, ...] = ()
    cost_rate: int = 0
    urgent: bool = False


@dataclass(frozen=True)
class ClockDecl:
    name: str
    size: int = 1


@dataclass(frozen=True)
class CounterDecl:
    name: str
    low: int
    high: int
    initial: int = 0


@dataclass(frozen=True)
class Automaton:
    name: str
    locations: Tuple[Location, ...]
    edges: Tuple[Edge, ...]
    initial: str
    clocks: Tuple[ClockDecl, ...] = ()
    counters: Tuple[CounterDecl, ...] = ()


@dataclass(frozen=True)
class NetworkState:
    """Configuration of a network; ``cost`` is carried but not part of identity"""

    locs: Tuple[int, ...]
    clocks: Tuple[Tuple[int, ...], ...]
    counters: Tuple[Tuple[int, ...], ...]
    cost: int = field(default=0, compare=False)


Pred = Callable[[Sequence[int], Sequence[int]], bool]


def _is_integral(value: Bound) -> bool:
    return math.isinf(value) or float(value).is_integer()


class _CompiledEdge:
    __slots__ = (
        "edge",
        "target",
        "guard",
        "resets",
        "updates",
        "out_channels",
        "relay",
        "cost",
    )

    def __init__(self, edge: Edge, target: int, guard, resets, updates) -> None:
        self.edge = edge
        self.target = target
        self.guard: Tuple[Pred, ...] = guard
        self.resets = resets
        self.updates = updates
        self.relay = edge.relay
        self.cost = edge.cost
        if edge.sync is not None and edge.sync.emit:
            self.out_channels = (edge.sync.channel,) + edge.relay
        else:
            self.out_channels = edge.relay


class _CompiledAutomaton:
    """Index-based form of one automaton inside a network"""

    def __init__(self, automaton: Automaton) -> None:
        self.automaton = automaton
        self.loc_index: Dict[str, int] = {}
        for i, loc in enumerate(automaton.locations):
            if loc.name in self.loc_index:
                raise AutomatonError(
                    f"{automaton.name}: duplicate location {loc.name!r}"
                )
            self.loc_index[loc.name] = i

        if automaton.initial not in self.loc_index:
            raise AutomatonError(
                f"{automaton.name}: initial location {automaton.initial!r} undeclared"
            )

        self.clock_base: Dict[str, Tuple[int, int]] = {}
        n_slots = 0
        for decl in automaton.clocks:
            if decl.size < 1:
                raise AutomatonError(f"{automaton.name}: clock {decl.name!r} size < 1")
            self.clock_base[decl.name] = (n_slots, decl.size)
            n_slots += decl.size

        self.counter_index: Dict[str, int] = {}
        for i, decl in enumerate(automaton.counters):
            if not decl.low <= decl.initial <= decl.high:
                raise AutomatonError(
                    f"{automaton.name}: counter {decl.name!r} "
                    "initial value out of range"
                )
            self.counter_index[decl.name] = i
        self.counter_low = tuple(d.low for d in automaton.counters)
        self.counter_high = tuple(d.high for d in automaton.counters)

        self.caps = self._clock_caps(n_slots)

        self.invariants: List[Tuple[Pred, ...]] = [
            tuple(self._compile(c) for c in loc.invariant)
            for loc in automaton.locations
        ]
        self.cost_rates = tuple(loc.cost_rate for loc in automaton.locations)
        self.urgent = tuple(loc.urgent for loc in automaton.locations)

        self.initiators: List[List[_CompiledEdge]] = [[] for _ in automaton.locations]
        self.receivers: Dict[Tuple[int, str], List[_CompiledEdge]] = {}
        for edge in automaton.edges:
            for end in (edge.source, edge.target):
                if end not in self.loc_index:
                    raise AutomatonError(
                        f"{automaton.name}: edge refers to undeclared location {end!r}"
                    )
            compiled = _CompiledEdge(
                edge,
                self.loc_index[edge.target],
                tuple(self._compile(c) for c in edge.guard),
                tuple(self._slot_resolver(ref) for ref in edge.resets),
                tuple(self._compile_update(u) for u in edge.updates),
            )
            source = self.loc_index[edge.source]
            if edge.sync is not None and not edge.sync.emit:
                key = (source, edge.sync.channel)
                self.receivers.setdefault(key, []).append(compiled)
            else:
                self.initiators[source].append(compiled)

    def _constraints(self):
        for loc in self.automaton.locations:
            yield from loc.invariant
        for edge in self.automaton.edges:
            yield from edge.guard

    def _clock_caps(self, n_slots: int) -> Tuple[int, ...]:
        """Cap each clock at one above the largest finite constant it meets"""
        max_const = {name: 0 for name in self.clock_base}
        for c in self._constraints():
            if not _is_integral(c.value):
                raise AutomatonError(
                    f"{self.automaton.name}: non-integer constant {c.value!r}"
                )
            if isinstance(c, ClockBound):
                if c.ref.clock not in self.clock_base:
                    raise AutomatonError(
                        f"{self.automaton.name}: undeclared clock {c.ref.clock!r}"
                    )
                if not math.isinf(c.value):
                    max_const[c.ref.clock] = max(max_const[c.ref.clock], int(c.value))

        caps = [0] * n_slots
        for name, (base, size) in self.clock_base.items():
            for slot in range(base, base + size):
                caps[slot] = max_const[name] + 1
        return tuple(caps)

    def _counter(self, name: str) -> int:
        try:
            return self.counter_index[name]
        except KeyError:
            raise AutomatonError(f"{self.automaton.name}: undeclared counter {name!r}")

    def _slot_resolver(self, ref: ClockRef) -> Callable[[Sequence[int]], int]:
        try:
            base, size = self.clock_base[ref.clock]
        except KeyError:
            raise AutomatonError(
                f"{self.automaton.name}: undeclared clock {ref.clock!r}"
            )

        if ref.index is None:
            slot = base + ref.offset % size
            return lambda counters: slot

        cidx = self._counter(ref.index)
        offset = ref.offset
        return lambda counters: base + (counters[cidx] - offset) % size

    def _compile(self, c: Constraint) -> Pred:
        if c.op not in OPS:
            raise AutomatonError(f"{self.automaton.name}: unknown operator {c.op!r}")
        op, value = OPS[c.op], c.value

        if isinstance(c, CounterBound):
            cidx = self._counter(c.counter)
            return lambda clocks, counters: op(counters[cidx], value)

        resolve = self._slot_resolver(c.ref)
        if c.active_if is None:
            return lambda clocks, counters: op(clocks[resolve(counters)], value)

        active = self._compile(c.active_if)
        return lambda clocks, counters: (
            not active(clocks, counters) or op(clocks[resolve(counters)], value)
        )

    def _compile_update(self, u: CounterUpdate):
        return (self._counter(u.counter), u.delta, u.assign, u.modulo, u.saturate)

    def apply(
        self, edge: _CompiledEdge, clocks: Tuple[int, ...], counters: Tuple[int, ...]
    ) -> Optional[Tuple[int, Tuple[int, ...], Tuple[int, ...]]]:
        """Fire edge on this automaton's local valuation; None if a counter
        leaves its declared range"""
        new_clocks = clocks
        if edge.resets:
            as_list = list(clocks)
            for resolve in edge.resets:
                as_list[resolve(counters)] = 0
            new_clocks = tuple(as_list)

        new_counters = counters
        if edge.updates:
            as_list = list(counters)
            for cidx, delta, assign, modulo, saturate in edge.updates:
                value = assign if assign is not None else counters[cidx] + delta
                if modulo is not None:
                    value %= modulo
                if saturate is not None:
                    value = min(value, saturate)
                if not self.counter_low[cidx] <= value <= self.counter_high[cidx]:
                    log.debug(
                        "%s: counter %s overflow (%d)",
                        self.automaton.name,
                        self.automaton.counters[cidx].name,
                        value,
                    )
                    return None
                as_list[cidx] = value
            new_counters = tuple(as_list)

        return edge.target, new_clocks, new_counters

    def holds(
        self, loc: int, clocks: Sequence[int], counters: Sequence[int]
    ) -> bool:
        return all(pred(clocks, counters) for pred in self.invariants[loc])


def _replace(values: tuple, i: int, value) -> tuple:
    return values[:i] + (value,) + values[i + 1 :]


_Work = Tuple[Tuple[int, ...], Tuple[Tuple[int, ...], ...], Tuple[Tuple[int, ...], ...]]


class Network:
    """Synchronised product of automata; immutable once built"""

    def __init__(self, automata: Sequence[Automaton]) -> None:
        self.automata: Tuple[Automaton, ...] = tuple(automata)
        names = [a.name for a in self.automata]
        if len(set(names)) != len(names):
            raise AutomatonError(f"Duplicate automaton names in {names}")

        self._compiled = [_CompiledAutomaton(a) for a in self.automata]
        self._index = {a.name: i for i, a in enumerate(self.automata)}

    def __reduce__(self):
        # Compiled predicates are closures; rebuild them after unpickling
        return (Network, (self.automata,))

    def automaton_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AutomatonError(f"No automaton named {name!r}")

    def location_index(self, automaton: str, location: str) -> int:
        compiled = self._compiled[self.automaton_index(automaton)]
        try:
            return compiled.loc_index[location]
        except KeyError:
            raise AutomatonError(f"{automaton}: no location named {location!r}")

    def caps(self, automaton: str) -> Tuple[int, ...]:
        return self._compiled[self.automaton_index(automaton)].caps

    def initial_state(self) -> NetworkState:
        return NetworkState(
            locs=tuple(c.loc_index[c.automaton.initial] for c in self._compiled),
            clocks=tuple(tuple(0 for _ in c.caps) for c in self._compiled),
            counters=tuple(
                tuple(d.initial for d in c.automaton.counters) for c in self._compiled
            ),
        )

    def invariants_hold(self, work: _Work) -> bool:
        locs, clocks, counters = work
        return all(
            comp.holds(locs[i], clocks[i], counters[i])
            for i, comp in enumerate(self._compiled)
        )

    def _deliver(
        self, work: _Work, pending: Tuple[Tuple[int, str], ...], cost: int, depth: int
    ) -> Iterator[Tuple[_Work, int]]:
        if not pending:
            yield work, cost
            return

        if depth > MAX_RELAY_DEPTH:
            raise AutomatonError("Relay chain too deep, check for cyclic relays")

        (sender, channel), rest = pending[0], pending[1:]
        locs, clocks, counters = work
        for b, comp in enumerate(self._compiled):
            if b == sender:
                continue
            for edge in comp.receivers.get((locs[b], channel), ()):
                if not all(pred(clocks[b], counters[b]) for pred in edge.guard):
                    continue
                applied = comp.apply(edge, clocks[b], counters[b])
                if applied is None:
                    continue
                loc, new_clocks, new_counters = applied
                new_work = (
                    _replace(locs, b, loc),
                    _replace(clocks, b, new_clocks),
                    _replace(counters, b, new_counters),
                )
                relays = tuple((b, r) for r in edge.relay)
                yield from self._deliver(
                    new_work, relays + rest, cost + edge.cost, depth + 1
                )

    def discrete_successors(
        self, s: NetworkState
    ) -> Iterator[Tuple[NetworkState, int]]:
        work: _Work = (s.locs, s.clocks, s.counters)
        for a, comp in enumerate(self._compiled):
            clocks, counters = s.clocks[a], s.counters[a]
            for edge in comp.initiators[s.locs[a]]:
                if not all(pred(clocks, counters) for pred in edge.guard):
                    continue
                applied = comp.apply(edge, clocks, counters)
                if applied is None:
                    continue
                loc, new_clocks, new_counters = applied
                start = (
                    _replace(work[0], a, loc),
                    _replace(work[1], a, new_clocks),
                    _replace(work[2], a, new_counters),
                )
                pending = tuple((a, ch) for ch in edge.out_channels)
                for final, cost in self._deliver(start, pending, edge.cost, 0):
                    if self.invariants_hold(final):
                        yield NetworkState(*final, cost=s.cost + cost), cost

    def delay_successor(self, s: NetworkState) -> Optional[Tuple[NetworkState, int]]:
        """Unit time step, or None when an urgent location or an invariant
        forbids it"""
        if any(comp.urgent[s.locs[i]] for i, comp in enumerate(self._compiled)):
            return None

        clocks = tuple(
            tuple(v + 1 if v < cap else cap for v, cap in zip(cl, comp.caps))
            for cl, comp in zip(s.clocks, self._compiled)
        )
        work = (s.locs, clocks, s.counters)
        if not self.invariants_hold(work):
            return None

        rate = sum(
            comp.cost_rates[s.locs[i]] for i, comp in enumerate(self._compiled)
        )
        return NetworkState(s.locs, clocks, s.counters, cost=s.cost + rate), rate

    def format_state(self, s: NetworkState) -> str:
        """Debug dump ``locvec|clocks|counters|cost``"""
        locs = ",".join(
            comp.automaton.locations[loc].name
            for comp, loc in zip(self._compiled, s.locs)
        )
        clocks = ";".join(",".join(map(str, cl)) for cl in s.clocks)
        counters = ";".join(",".join(map(str, co)) for co in s.counters)
        return f"{locs}|{clocks}|{counters}|{format_bound(s.cost)}"


def successors(net: Network, s: NetworkState) -> List[Tuple[NetworkState, int]]:
    """All one-step successors of s with their cost increments: the time step
    first (if allowed), then discrete steps in automaton and edge order.

    An empty list marks a deadlock.
    """
    result: List[Tuple[NetworkState, int]] = []
    delayed = net.delay_successor(s)
    if delayed is not None:
        result.append(delayed)

    result.extend(net.discrete_successors(s))
    if not result:
        log.debug("Deadlock at %s", net.format_state(s))

    return result
