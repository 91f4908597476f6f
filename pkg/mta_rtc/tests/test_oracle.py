"""Tests for the exhaustive reference semantics."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import dataclasses

import pytest

from mta_rtc.config import SystemDescription
from mta_rtc.curves import Curve
from mta_rtc.mta import Mode, Mta, Transition, TransitionKind
from mta_rtc.oracle import (
    OracleBoundsError,
    OracleConfig,
    OracleError,
    behaviours,
    check_bounds,
    enumerate_conforming,
    exact_output_curve,
    extendable,
    run_mta,
)
from mta_rtc.streams import EventStream


@pytest.fixture
def sleep_run() -> Mta:
    sleep = Mode(
        name="sleep",
        buf_high=4,
        transitions=(Transition(TransitionKind.BUFFER_ABOVE, "run"),),
    )
    run = Mode(
        name="run",
        service=Curve([1, 2, 3], [1, 2, 3]),
        buf_low=1,
        transitions=(Transition(TransitionKind.BUFFER_BELOW, "sleep"),),
    )
    return Mta(modes=(sleep, run), initial="sleep")


def _oracle_config(desc: SystemDescription) -> OracleConfig:
    return OracleConfig(
        mta=desc.mta,
        arrival=desc.arrival,
        max_events=desc.oracle.max_events,
        horizon=desc.oracle.horizon,
    )


def _streams(*times_list) -> frozenset:
    return frozenset(EventStream(times) for times in times_list)


@pytest.mark.parametrize(
    "c,max_events,horizon,expected",
    [
        (Curve([2], [2]), 3, 4, _streams([0, 2, 4])),
        (Curve([1], [2]), 2, 2, _streams([0, 1], [0, 2])),
        (Curve([1, 3], [2, 4]), 3, 4, _streams([0, 1, 3], [0, 2, 3], [0, 2, 4])),
        (Curve([2], [2]), 4, 4, frozenset()),
    ],
)
def test_enumerate_conforming(c: Curve, max_events: int, horizon: int, expected):
    assert enumerate_conforming(c, max_events, horizon) == expected


def test_enumerate_conforming_cap() -> None:
    with pytest.raises(OracleBoundsError):
        enumerate_conforming(Curve([0], [4]), 4, 8, cap=10)


def test_extendable() -> None:
    assert extendable(EventStream([0, 2]), Curve([2], [2]))
    assert not extendable(EventStream([0, 1]), Curve([2], [2]))
    # conforms, but a third event can never come 3 after the first
    assert not extendable(EventStream([0, 2]), Curve([2, 3], [2, 3]))


def test_run_single_mode(single_mode: SystemDescription) -> None:
    inputs = EventStream([0, 2, 4, 6])
    run = run_mta(single_mode.mta, inputs, horizon=8)
    assert run.output == EventStream([0, 2, 4, 6])
    assert run.modes == ((0, "run"),)

    # idle service first at t=2 delays the first output to the next completion
    run = run_mta(single_mode.mta, inputs, choices=[1], horizon=8)
    assert run.output == EventStream([0, 3, 4, 6])


def test_run_empty_input(sleep_run: Mta) -> None:
    run = run_mta(sleep_run, EventStream([0]), horizon=10)
    assert run.output == EventStream([0])
    assert run.modes == ((0, "sleep"),)
    assert run.end == 10


def test_run_switches_modes(sleep_run: Mta) -> None:
    run = run_mta(sleep_run, EventStream([0, 1, 2, 3, 4, 5]), horizon=12)
    # the fifth request wakes the component, service starts one unit later
    assert run.output == EventStream([0, 6, 7, 8, 9, 10])
    assert run.modes == ((0, "sleep"), (5, "run"), (10, "sleep"))


def test_run_bad_choice(single_mode: SystemDescription) -> None:
    with pytest.raises(OracleError):
        run_mta(single_mode.mta, EventStream([0, 2]), choices=[5], horizon=4)


def test_run_full_buffer() -> None:
    slow = Mta(modes=(Mode(name="run", service=Curve([2], [2])),), initial="run")
    inputs = EventStream([0, 1, 2, 3])
    with pytest.raises(OracleBoundsError, match="full buffer"):
        run_mta(slow, inputs, horizon=10, max_backlog=1)

    run = run_mta(slow, inputs, horizon=10, max_backlog=4)
    assert run.output == EventStream([0, 2, 4, 6])


@pytest.mark.parametrize(
    "changes",
    [
        {"max_events": 9},
        {"max_events": 0},
        {"horizon": 41},
        {"horizon": 5},
        {"channels": {"wake": Curve([3], [3])}},
    ],
)
def test_check_bounds(single_mode: SystemDescription, changes: dict) -> None:
    config = dataclasses.replace(_oracle_config(single_mode), **changes)
    with pytest.raises(OracleError):
        check_bounds(config)


def test_exact_output_curve(single_mode: SystemDescription) -> None:
    c = exact_output_curve(_oracle_config(single_mode), 4)
    assert c == Curve([1, 3, 5, 7], [3, 5, 7, 9])


def test_exact_output_curve_parallel(single_mode: SystemDescription) -> None:
    config = _oracle_config(single_mode)
    assert exact_output_curve(config, 4, jobs=2) == exact_output_curve(config, 4)


def test_wider_input_widens_output(single_mode: SystemDescription) -> None:
    config = _oracle_config(single_mode)
    arrival = single_mode.arrival
    wider = dataclasses.replace(
        config, arrival=Curve(arrival.lower, [up + 1 for up in arrival.upper])
    )
    exact = exact_output_curve(config, 4)
    widened = exact_output_curve(wider, 4)
    for k in range(1, 5):
        assert widened.point(k)[0] <= exact.point(k)[0]
        assert widened.point(k)[1] >= exact.point(k)[1]


def test_behaviours(single_mode: SystemDescription) -> None:
    config = dataclasses.replace(_oracle_config(single_mode), max_events=2)
    observed = behaviours(config)
    outputs = {out.times for _, out in observed}
    assert (0, 2) in outputs
    assert (0, 3) in outputs
    for inputs, out in observed:
        assert out.m <= inputs.m
