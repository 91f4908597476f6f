"""Tests for multi-granularity analysis and reports."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import copy
import os
from fractions import Fraction

import pytest
import yaml

from mta_rtc.config import DATA_DIR, SystemDescription, parse, parse_config_file
from mta_rtc.curves import Curve
from mta_rtc.engine import BufferOverflow
from mta_rtc.oracle import OracleConfig, exact_output_curve
from mta_rtc.pipeline import (
    DISTANCE_FILENAME,
    NAIVE_FILENAME,
    REFINED_FILENAME,
    REPORT_FILENAME,
    AnalysisReport,
    analyze_granularity,
    check_lemma1,
    curve_filename,
    improved_points,
    run_analysis,
    stats_filename,
    write_report,
)

FINE = Curve([1, 3, 5, 7], [3, 5, 7, 9])


@pytest.fixture(scope="module")
def report() -> AnalysisReport:
    this_dir = os.path.dirname(__file__)
    desc = parse_config_file(os.path.join(this_dir, "single_mode.yaml"))
    return run_analysis(desc, include_fine=True)


def test_fine_and_coarse_curves(report: AnalysisReport) -> None:
    assert sorted(report.results) == [1, 2]
    assert report.fine == FINE
    # coarse requests every 4, coarse completions every 2
    assert report.results[2].curve == Curve([2, 6], [6, 10])
    assert not report.partial
    assert report.empty is None


def test_self_check_and_distance(report: AnalysisReport) -> None:
    assert report.lemma1 == []
    assert report.distances == {2: Fraction(1)}


def test_combined_curves(report: AnalysisReport) -> None:
    assert report.naive is not None
    assert report.refined is not None
    assert report.naive.n == report.refined.n == 4
    for k in range(1, 5):
        assert report.refined.point(k)[0] >= report.naive.point(k)[0]
        assert report.refined.point(k)[1] <= report.naive.point(k)[1]


def test_write_report(report: AnalysisReport, tmp_path) -> None:
    out_dir = str(tmp_path / "out")
    written = write_report(report, out_dir)

    expected = {
        curve_filename(1),
        curve_filename(2),
        stats_filename(1, "lower"),
        stats_filename(2, "upper"),
        NAIVE_FILENAME,
        REFINED_FILENAME,
        DISTANCE_FILENAME,
        REPORT_FILENAME,
    }
    assert expected <= {os.path.basename(path) for path in written}
    assert Curve.from_file(os.path.join(out_dir, curve_filename(2))) == Curve(
        [2, 6], [6, 10]
    )

    with open(os.path.join(out_dir, DISTANCE_FILENAME)) as distance_file:
        assert distance_file.read() == "g,distance,distance_float\n2,1,1.0000\n"

    with open(os.path.join(out_dir, REPORT_FILENAME)) as report_file:
        summary = yaml.safe_load(report_file)
    assert summary["partial"] is False
    assert summary["lemma1"] == {"checked": True, "violations": []}
    assert summary["granularities"][2]["points"] == 2
    assert summary["distances"] == {2: "1"}


def test_report_is_deterministic(tmp_path) -> None:
    this_dir = os.path.dirname(__file__)
    desc = parse_config_file(os.path.join(this_dir, "single_mode.yaml"))
    contents = []
    for run in ("first", "second"):
        out_dir = str(tmp_path / run)
        write_report(run_analysis(desc), out_dir)
        with open(os.path.join(out_dir, REPORT_FILENAME)) as report_file:
            report_s = report_file.read()
        with open(os.path.join(out_dir, curve_filename(2))) as curve_file:
            contents.append((report_s, curve_file.read()))

    assert contents[0] == contents[1]


def test_partial_results_skip_self_check(single_mode: SystemDescription) -> None:
    report = run_analysis(single_mode, include_fine=True, state_budget=1)
    assert report.partial
    assert report.results[1].curve.lower == (0, 0, 0, 0)
    assert report.lemma1 == []


def test_check_lemma1() -> None:
    violations = check_lemma1(FINE, Curve([4, 6], [4, 10]), 2)
    assert [v.index for v in violations] == [1, 1]
    assert check_lemma1(FINE, Curve([2, 6], [6, 10]), 2) == []


def test_improved_points() -> None:
    naive = Curve([1, 2, 3], [5, 6, 7])
    refined = Curve([1, 3, 3], [5, 6, 6])
    assert improved_points(naive, refined) == [2, 3]


def _variant(settings: dict, **changes) -> SystemDescription:
    settings = copy.deepcopy(settings)
    settings.update(changes)
    return parse(settings)


def _assert_engine_matches_oracle(desc: SystemDescription) -> None:
    config = OracleConfig(
        mta=desc.mta,
        arrival=desc.arrival,
        max_events=desc.oracle.max_events,
        horizon=desc.oracle.horizon,
        max_backlog=desc.engine.max_backlog,
    )
    result = analyze_granularity(desc, 1, desc.engine.state_budget)
    assert not result.partial
    assert result.curve == exact_output_curve(config, desc.n)


@pytest.mark.parametrize(
    "changes",
    [
        {},
        {"initial_backlog": 1},
        {
            "arrival": {"lower": [3, 6, 9, 12], "upper": [3, 6, 9, 12]},
            "engine": {"state_budget": 200000, "horizon": 16},
        },
    ],
)
def test_engine_matches_oracle(single_mode_settings: dict, changes: dict) -> None:
    desc = _variant(single_mode_settings, **changes)
    _assert_engine_matches_oracle(desc)


@pytest.fixture
def sleep_run_settings() -> dict:
    with open(os.path.join(DATA_DIR, "pmc_tiny.yaml")) as settings_file:
        return yaml.safe_load(settings_file)


@pytest.mark.parametrize("buf_high", [1, 2])
def test_two_mode_engine_matches_oracle(
    sleep_run_settings: dict, buf_high: int
) -> None:
    sleep_run_settings["modes"][0]["buf_high"] = buf_high
    _assert_engine_matches_oracle(parse(sleep_run_settings))


def test_two_mode_backlog_engine_matches_oracle(sleep_run_settings: dict) -> None:
    # starts asleep above its wake-up threshold
    _assert_engine_matches_oracle(_variant(sleep_run_settings, initial_backlog=3))


def _overflowing(settings: dict) -> dict:
    """Requests every time unit, completions every 2, room for one request"""
    settings = copy.deepcopy(settings)
    settings["arrival"] = {"lower": [1, 2, 3, 4], "upper": [1, 2, 3, 4]}
    settings["modes"][0]["service"] = {"lower": [2, 4, 6, 8], "upper": [2, 4, 6, 8]}
    settings["engine"] = {"state_budget": 200000, "horizon": 12, "max_backlog": 1}
    return settings


@pytest.mark.parametrize("g", [1, 2])
def test_full_buffer_is_reported(single_mode_settings: dict, g: int) -> None:
    desc = parse(_overflowing(single_mode_settings))
    with pytest.raises(BufferOverflow, match="max_backlog"):
        analyze_granularity(desc, g, desc.engine.state_budget)
