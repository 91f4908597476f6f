"""Mode-based timed automata (MTA): declarative description of a power-managed
component, its validation, and coarse buffer thresholds."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, NamedTuple, Optional, Tuple

from .curves import INF, Bound, Curve, Violation, format_bound, validate


class MtaError(Exception):
    """Base error for MTA models"""


class TransitionKind(Enum):
    SYNC = "sync"
    TIMEOUT = "timeout"
    BUFFER_ABOVE = "buffer_above"
    BUFFER_BELOW = "buffer_below"


@dataclass(frozen=True)
class Transition:
    kind: TransitionKind
    target: str
    channel: Optional[str] = None


@dataclass(frozen=True)
class Mode:
    """A mode of the component with its service curve, buffer thresholds and
    dwell bounds"""

    name: str
    service: Optional[Curve] = None
    buf_low: Bound = -INF
    buf_high: Bound = INF
    dwell_min: int = 0
    dwell_max: Bound = INF
    transitions: Tuple[Transition, ...] = ()

    def transition(self, kind: TransitionKind) -> Optional[Transition]:
        for trans in self.transitions:
            if trans.kind is kind:
                return trans
        return None

    # A threshold or dwell bound only takes effect through its transition

    @property
    def effective_high(self) -> Bound:
        if self.transition(TransitionKind.BUFFER_ABOVE) is None:
            return INF
        return self.buf_high

    @property
    def effective_low(self) -> Bound:
        if self.transition(TransitionKind.BUFFER_BELOW) is None:
            return -INF
        return self.buf_low

    @property
    def effective_dwell_max(self) -> Bound:
        if self.transition(TransitionKind.TIMEOUT) is None:
            return INF
        return self.dwell_max


@dataclass(frozen=True)
class Mta:
    modes: Tuple[Mode, ...]
    initial: str
    initial_backlog: int = 0
    channels: Tuple[str, ...] = ()
    _index: Dict[str, int] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        for i, mode in enumerate(self.modes):
            self._index.setdefault(mode.name, i)

    def mode(self, name: str) -> Mode:
        try:
            return self.modes[self._index[name]]
        except KeyError:
            raise MtaError(f"No mode named {name!r}")

    def mode_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MtaError(f"No mode named {name!r}")


class CoarseThresholds(NamedTuple):
    y_low: Bound
    y_high: Bound
    h_low: Bound
    h_high: Bound


def _floor_div(value: Bound, g: int) -> Bound:
    return value if math.isinf(value) else int(value) // g


def _ceil_div(value: Bound, g: int) -> Bound:
    return value if math.isinf(value) else -(-int(value) // g)


def coarse_thresholds(b_low: Bound, b_high: Bound, g: int) -> CoarseThresholds:
    """Floor/ceil brackets of the coarse backlog at which the fine thresholds
    b_high + 1 and b_low - 1 can be reached"""
    if g < 1:
        raise MtaError(f"Granularity must be >= 1, got {g}")

    return CoarseThresholds(
        y_low=_floor_div(b_high + 1, g),
        y_high=_ceil_div(b_high + 1, g),
        h_low=_floor_div(b_low - 1, g),
        h_high=_ceil_div(b_low - 1, g),
    )


def _validate_mode(m: Mta, i: int, mode: Mode) -> Optional[Violation]:
    path = f"modes[{i}]"
    if mode.service is not None:
        violation = validate(mode.service)
        if violation is not None:
            return Violation(f"{path}.service", f"k={violation}")
        if mode.service.n < 1:
            return Violation(f"{path}.service", "service curve has no points")

    if mode.buf_low > mode.buf_high:
        return Violation(
            path,
            f"buf_low {format_bound(mode.buf_low)} > "
            f"buf_high {format_bound(mode.buf_high)}",
        )

    if math.isinf(mode.dwell_min) or mode.dwell_min < 0:
        return Violation(f"{path}.dwell_min", "must be a non-negative integer")

    if mode.dwell_min > mode.dwell_max:
        return Violation(path, "dwell_min > dwell_max")

    seen = set()
    for j, trans in enumerate(mode.transitions):
        t_path = f"{path}.transitions[{j}]"
        if trans.kind in seen:
            return Violation(t_path, f"second {trans.kind.value} transition")
        seen.add(trans.kind)

        if trans.target not in m._index:
            return Violation(t_path, f"target {trans.target!r} is not a declared mode")

        if trans.kind is TransitionKind.SYNC:
            if trans.channel is None or trans.channel not in m.channels:
                return Violation(
                    t_path, f"sync channel {trans.channel!r} is not declared"
                )
        elif trans.kind is TransitionKind.TIMEOUT and math.isinf(mode.dwell_max):
            return Violation(t_path, "timeout needs a finite dwell_max")
        elif trans.kind is TransitionKind.BUFFER_ABOVE and math.isinf(mode.buf_high):
            return Violation(t_path, "buffer_above needs a finite buf_high")
        elif trans.kind is TransitionKind.BUFFER_BELOW and math.isinf(mode.buf_low):
            return Violation(t_path, "buffer_below needs a finite buf_low")

    return None


def validate_mta(m: Mta) -> Optional[Violation]:
    """Return None when the model is well formed, else the first violation"""
    if not m.modes:
        return Violation("modes", "at least one mode is needed")

    if len(m._index) != len(m.modes):
        names = [mode.name for mode in m.modes]
        dup = next(name for name in names if names.count(name) > 1)
        return Violation("modes", f"duplicate mode name {dup!r}")

    for i, mode in enumerate(m.modes):
        violation = _validate_mode(m, i, mode)
        if violation is not None:
            return violation

    if m.initial not in m._index:
        return Violation("initial", f"{m.initial!r} is not a declared mode")

    if m.initial_backlog < 0:
        return Violation("initial_backlog", "must be non-negative")

    return None
