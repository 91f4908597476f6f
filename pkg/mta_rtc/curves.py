"""Interval-curve algebra: representation, pseudo-inversion, sampling, closure and
multi-granularity combination.

A :class:`Curve` stores, for k = 1..n, lower and upper bounds on the length of the
time interval spanned by any k consecutive events, ``t[i+k] - t[i]``. The point
k = 0 is implicit and never stored. The unbounded sentinel is ``math.inf``.
"""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import csv
import io
import logging
import math
from fractions import Fraction
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

log = logging.getLogger(__name__)

INF = math.inf

Bound = Union[int, float]


class CurveError(Exception):
    """Base error for curve algebra"""


class EmptyCurveError(CurveError):
    """Curve pair is contradictory: no stream can conform to it"""

    def __init__(self, message: str, index: int) -> None:
        super().__init__(message)
        self.index = index


class Violation(NamedTuple):
    """First violated definitional constraint of a curve or model"""

    index: Union[int, str]
    message: str

    def __str__(self) -> str:
        return f"{self.index}: {self.message}"


def as_bound(value: Union[int, float, str, None]) -> Bound:
    """Normalise a curve entry: integers stay integers, ``inf``/``None`` become
    the sentinel"""
    if value is None:
        return INF

    if isinstance(value, str):
        value = value.strip()
        if value in ("inf", "+inf"):
            return INF
        if value == "-inf":
            return -INF
        return int(value)

    if isinstance(value, (float, np.floating)):
        if math.isinf(value):
            return INF if value > 0 else -INF
        if not float(value).is_integer():
            raise CurveError(f"Curve entries must be integers, got {value!r}")
        return int(value)

    return int(value)


def format_bound(value: Bound) -> str:
    if value == INF:
        return "inf"
    if value == -INF:
        return "-inf"
    return str(int(value))


class Curve:
    """Pair of lower/upper interval-length bounds indexed by event count"""

    CSV_HEADER = ("k", "xi_lower", "xi_upper")

    def __init__(self, lower: Sequence[Bound], upper: Sequence[Bound]) -> None:
        if len(lower) != len(upper):
            raise CurveError(
                "Lower and upper curves differ in length: "
                f"{len(lower)} != {len(upper)}"
            )

        self._lower: Tuple[Bound, ...] = tuple(as_bound(v) for v in lower)
        self._upper: Tuple[Bound, ...] = tuple(as_bound(v) for v in upper)

    @classmethod
    def from_string(cls, curve_s: str) -> "Curve":
        """Construct curve from its CSV serialisation"""
        reader = csv.reader(io.StringIO(curve_s))
        try:
            header = next(reader)
        except StopIteration:
            raise CurveError("Empty curve file")

        if tuple(h.strip() for h in header) != cls.CSV_HEADER:
            raise CurveError(
                f"Expecting header {','.join(cls.CSV_HEADER)!r}, "
                f"got {','.join(header)!r}"
            )

        lower: List[Bound] = []
        upper: List[Bound] = []
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != 3:
                raise CurveError(f"Row {row_num}: expecting 3 fields, got {len(row)}")
            try:
                k = int(row[0])
                lo, up = as_bound(row[1]), as_bound(row[2])
            except ValueError as exc:
                raise CurveError(f"Row {row_num}: {exc}")

            if k != row_num:
                raise CurveError(f"Row {row_num}: expecting k={row_num}, got k={k}")

            lower.append(lo)
            upper.append(up)

        return cls(lower, upper)

    @classmethod
    def from_file(cls, curve_filepath: str) -> "Curve":
        """Construct curve from a CSV file"""
        with open(curve_filepath, "r") as curve_file:
            return cls.from_string(curve_file.read())

    @classmethod
    def from_dict(cls, curve_d: dict) -> "Curve":
        """Construct curve from a ``{"lower": [...], "upper": [...]}`` mapping"""
        return cls(curve_d["lower"], curve_d["upper"])

    @property
    def n(self) -> int:
        return len(self._lower)

    @property
    def lower(self) -> Tuple[Bound, ...]:
        """Lower bounds, ``lower[k - 1]`` is the bound for k events"""
        return self._lower

    @property
    def upper(self) -> Tuple[Bound, ...]:
        return self._upper

    def point(self, k: int) -> Tuple[Bound, Bound]:
        """(lower, upper) at 1-based index k"""
        if not 1 <= k <= self.n:
            raise IndexError(f"k={k} outside [1, {self.n}]")
        return self._lower[k - 1], self._upper[k - 1]

    def max_constant(self) -> int:
        """Largest finite entry, 0 for an unconstrained curve"""
        finite = [v for v in self._lower + self._upper if not math.isinf(v)]
        return int(max(finite, default=0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Curve):
            return NotImplemented
        return self._lower == other._lower and self._upper == other._upper

    def __hash__(self) -> int:
        return hash((self._lower, self._upper))

    def __repr__(self) -> str:
        return (
            f"Curve(lower=[{', '.join(map(format_bound, self._lower))}], "
            f"upper=[{', '.join(map(format_bound, self._upper))}])"
        )

    @property
    def serialisation(self) -> str:
        """CSV text: header row then one ``k,lower,upper`` row per point"""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for k, (lo, up) in enumerate(zip(self._lower, self._upper), start=1):
            writer.writerow((k, format_bound(lo), format_bound(up)))

        return buf.getvalue()

    def to_file(self, curve_filepath: str) -> None:
        with open(curve_filepath, "w", newline="") as curve_file:
            curve_file.write(self.serialisation)


class CountCurve:
    """Event count per window length, ``values[delta]`` for delta = 0..horizon"""

    def __init__(self, values: Iterable[int]) -> None:
        self._values = np.asarray(list(values), dtype=np.int64)
        if self._values.size == 0:
            raise CurveError("Count curve needs at least the value at delta=0")

    @property
    def horizon(self) -> int:
        return int(self._values.size - 1)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def validate(self) -> Optional[Violation]:
        if self._values[0] < 0:
            return Violation(0, "negative event count")

        drops = np.flatnonzero(np.diff(self._values) < 0)
        if drops.size:
            return Violation(int(drops[0]) + 1, "count curve is not non-decreasing")

        return None


def validate(c: Curve) -> Optional[Violation]:
    """Return None when both curve invariants hold, else the first violation"""
    for k in range(1, c.n + 1):
        lo, up = c.point(k)
        if lo < 0 or up < 0:
            return Violation(k, "negative duration")

        if lo > up:
            return Violation(k, f"lower {format_bound(lo)} > upper {format_bound(up)}")

        if k > 1:
            prev_lo, prev_up = c.point(k - 1)
            if lo < prev_lo:
                return Violation(k, "lower curve is not non-decreasing")
            if up < prev_up:
                return Violation(k, "upper curve is not non-decreasing")

    return None


def pseudo_invert_upper(a_lower: CountCurve, n: int) -> Tuple[Bound, ...]:
    """xi^U(k) = min{delta >= 0 : alpha^L(delta) >= k} for k = 1..n.

    Entries the count curve never reaches within its horizon are the sentinel.
    """
    ks = np.arange(1, n + 1)
    idx = np.searchsorted(a_lower.values, ks, side="left")
    return tuple(INF if i > a_lower.horizon else int(i) for i in idx)


def pseudo_invert_lower(a_upper: CountCurve, n: int) -> Tuple[Bound, ...]:
    """xi^L(k) = max{delta >= 0 : alpha^U(delta) <= k} for k = 1..n.

    The maximum is clipped to the horizon, which keeps the result a valid lower
    bound when the count curve is cut short.
    """
    ks = np.arange(1, n + 1)
    idx = np.searchsorted(a_upper.values, ks, side="right") - 1
    return tuple(max(int(i), 0) for i in idx)


def sample(c: Curve, g: int) -> Curve:
    """Coarse curve at granularity g: point k of the result is point g*k of c"""
    if g < 1:
        raise CurveError(f"Granularity must be >= 1, got {g}")

    if g > c.n:
        raise CurveError(f"Granularity {g} exceeds curve length {c.n}")

    n_out = c.n // g
    return Curve(c.lower[g - 1 :: g][:n_out], c.upper[g - 1 :: g][:n_out])


def rescale(c: Curve, g: int) -> List[Tuple[int, Bound, Bound]]:
    """Coarse points placed on fine indices: (g*k, lower(k), upper(k))"""
    return [(g * k, lo, up) for k, (lo, up) in enumerate(zip(c.lower, c.upper), 1)]


def _first_empty(lo: np.ndarray, up: np.ndarray) -> Optional[int]:
    bad = np.flatnonzero(lo > up)
    return int(bad[0]) + 1 if bad.size else None


def closure(c: Curve) -> Curve:
    """Tighten c to the fixpoint of the sub/superadditive and deconvolution rules.

    The result admits exactly the infinitely extendable streams c admits.
    Raises EmptyCurveError when the pair turns out to be contradictory.
    """
    n = c.n
    lo = np.asarray(c.lower, dtype=float)
    up = np.asarray(c.upper, dtype=float)

    empty_k = _first_empty(lo, up)
    if empty_k is not None:
        raise EmptyCurveError(f"Curve is empty at k={empty_k}", empty_k)

    max_rounds = 4 * n * n + 8
    with np.errstate(invalid="ignore"):
        for _ in range(max_rounds):
            prev_lo, prev_up = lo.copy(), up.copy()

            for a in range(1, n):
                # upper[a+b] <= upper[a] + upper[b], lower[a+b] >= lower[a] + lower[b]
                up[a:] = np.fmin(up[a:], up[a - 1] + up[: n - a])
                lo[a:] = np.fmax(lo[a:], lo[a - 1] + lo[: n - a])

            for k in range(1, n):
                # t[i+m] - t[i] = (t[i+m+k] - t[i]) - (t[i+m+k] - t[i+m])
                up[: n - k] = np.fmin(up[: n - k], up[k:] - lo[k - 1])
                lo[: n - k] = np.fmax(lo[: n - k], lo[k:] - up[k - 1])

            lo = np.maximum(lo, 0.0)

            empty_k = _first_empty(lo, up)
            if empty_k is not None:
                raise EmptyCurveError(f"Curve is empty at k={empty_k}", empty_k)

            if np.array_equal(lo, prev_lo) and np.array_equal(up, prev_up):
                break
        else:
            raise EmptyCurveError("Closure does not converge", 1)

    return Curve(lo.tolist(), up.tolist())


def combine_naive(coarse_results: Sequence[Tuple[int, Curve]]) -> Curve:
    """Pointwise best fine bounds implied by curves analysed at several
    granularities, before any refinement"""
    if not coarse_results:
        raise CurveError("At least one (granularity, curve) pair is needed")

    n_out = max(g * c.n for g, c in coarse_results)
    lower: List[Bound] = []
    upper: List[Bound] = []
    for m in range(1, n_out + 1):
        best_up: Bound = INF
        best_lo: Bound = 0
        for g, c in coarse_results:
            k_up = -(-m // g)
            if k_up <= c.n:
                best_up = min(best_up, c.upper[k_up - 1])

            k_lo = m // g
            if k_lo >= 1:
                best_lo = max(best_lo, c.lower[min(k_lo, c.n) - 1])

        lower.append(best_lo)
        upper.append(best_up)

    return Curve(lower, upper)


def combine(coarse_results: Sequence[Tuple[int, Curve]]) -> Curve:
    """Refined fine curve: closure of the naive multi-granularity combination"""
    return closure(combine_naive(coarse_results))


def distance(fine: Curve, coarse: Curve, g: int) -> Union[Fraction, float]:
    """Mean of the mean lower gap and the mean upper gap between a fine curve
    and a coarse curve at granularity g"""
    if coarse.n < 1 or coarse.n > fine.n // g:
        raise CurveError(
            f"Coarse curve of length {coarse.n} is incompatible with fine length "
            f"{fine.n} at g={g}"
        )

    ks = range(1, coarse.n + 1)
    lower_gaps = [fine.lower[g * k - 1] - coarse.lower[k - 1] for k in ks]
    upper_gaps = [coarse.upper[k - 1] - fine.upper[g * k - 1] for k in ks]

    if any(math.isinf(d) or math.isnan(d) for d in lower_gaps + upper_gaps):
        return INF

    mean_lower = Fraction(int(sum(lower_gaps)), coarse.n)
    mean_upper = Fraction(int(sum(upper_gaps)), coarse.n)
    return (mean_lower + mean_upper) / 2
