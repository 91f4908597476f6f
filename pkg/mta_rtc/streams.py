"""Concrete event streams, curve conformance, and granularity abstraction."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import csv
import io
from typing import Iterable, Tuple

from .curves import Curve


class StreamError(Exception):
    """Malformed event stream"""


class EventStream:
    """Timestamps t_0, t_1, ..., t_m with the origin t_0 = 0"""

    CSV_HEADER = "t"

    def __init__(self, times: Iterable[int]) -> None:
        self._times: Tuple[int, ...] = tuple(int(t) for t in times)
        if not self._times or self._times[0] != 0:
            raise StreamError("A stream starts with the origin t_0 = 0")

        for i, (a, b) in enumerate(zip(self._times, self._times[1:]), start=1):
            if b < a:
                raise StreamError(f"Timestamps decrease at index {i}: {a} > {b}")

    @classmethod
    def from_string(cls, stream_s: str) -> "EventStream":
        rows = [row for row in csv.reader(io.StringIO(stream_s)) if row]
        if not rows or rows[0] != [cls.CSV_HEADER]:
            raise StreamError(f"Expecting header {cls.CSV_HEADER!r}")

        try:
            return cls(int(row[0]) for row in rows[1:])
        except ValueError as exc:
            raise StreamError(str(exc))

    @property
    def times(self) -> Tuple[int, ...]:
        return self._times

    @property
    def m(self) -> int:
        """Index of the last event"""
        return len(self._times) - 1

    def __len__(self) -> int:
        return len(self._times)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventStream):
            return NotImplemented
        return type(self) is type(other) and self._times == other._times

    def __hash__(self) -> int:
        return hash(self._times)

    def __lt__(self, other: "EventStream") -> bool:
        return self._times < other._times

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self._times)})"

    @property
    def serialisation(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow((self.CSV_HEADER,))
        writer.writerows((t,) for t in self._times)
        return buf.getvalue()


class CoarseStream(EventStream):
    """Stream of coarse events T_0, T_1, ..., each standing for g fine events"""

    def __init__(self, g: int, times: Iterable[int]) -> None:
        if g < 1:
            raise StreamError(f"Granularity must be >= 1, got {g}")
        super().__init__(times)
        self.g = g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoarseStream):
            return NotImplemented
        return self.g == other.g and self.times == other.times

    def __hash__(self) -> int:
        return hash((self.g, self.times))

    def __repr__(self) -> str:
        return f"CoarseStream(g={self.g}, {list(self.times)})"


def conforms(s: EventStream, c: Curve) -> bool:
    """True iff lower(k) <= t[i+k] - t[i] <= upper(k) for every window in s"""
    t = s.times
    for k in range(1, min(c.n, s.m) + 1):
        lo, up = c.point(k)
        for i in range(0, s.m - k + 1):
            gap = t[i + k] - t[i]
            if gap < lo or gap > up:
                return False

    return True


def abstract(s: EventStream, g: int) -> CoarseStream:
    """Coarse stream with T_i = t_{g*i}"""
    return CoarseStream(g, s.times[::g])


def is_refinement(fine: EventStream, coarse: CoarseStream) -> bool:
    """True iff fine samples to coarse on their common prefix"""
    sampled = fine.times[:: coarse.g]
    common = min(len(sampled), len(coarse.times))
    return sampled[:common] == coarse.times[:common]
