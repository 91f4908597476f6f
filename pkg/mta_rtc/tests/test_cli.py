#!/usr/bin/env python

"""Tests for the `mta_rtc` console script."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import copy
import os

import pytest
import yaml
from click.testing import CliRunner

from mta_rtc import cli
from mta_rtc.curves import Curve
from mta_rtc.pipeline import (
    NAIVE_FILENAME,
    REFINED_FILENAME,
    REPORT_FILENAME,
    curve_filename,
)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def curve_filepath(tmp_path) -> str:
    path = str(tmp_path / "periodic.csv")
    Curve([1, 3, 5, 7], [3, 5, 7, 9]).to_file(path)
    return path


def _write_config(tmp_path, settings: dict) -> str:
    path = str(tmp_path / "system.yaml")
    with open(path, "w") as config_file:
        yaml.safe_dump(settings, config_file)
    return path


def test_cli_basic_invocation(runner: CliRunner) -> None:
    help_result = runner.invoke(cli.main, ["--help"])
    assert help_result.exit_code == 0
    assert "Usage" in help_result.output
    for command in ("analyze", "combine", "oracle", "plot", "sample"):
        assert command in help_result.output

    badcmd_result = runner.invoke(cli.main, ["badcmd"])
    assert badcmd_result.exit_code == 2
    assert "Error: No such command" in badcmd_result.output


def test_analyze_needs_config(runner: CliRunner) -> None:
    result = runner.invoke(cli.main, ["analyze"])
    assert result.exit_code == 2
    assert "Error:" in result.output


def test_analyze(runner: CliRunner, single_mode_filepath: str, tmp_path) -> None:
    outputs = []
    for run in ("first", "second"):
        out_dir = str(tmp_path / run)
        result = runner.invoke(
            cli.main, ["analyze", "-c", single_mode_filepath, "-o", out_dir, "--fine"]
        )
        assert result.exit_code == 0, result.output
        assert "g=2: 2 points" in result.output
        assert "distance g=2: 1" in result.output

        for filename in (curve_filename(1), curve_filename(2), REPORT_FILENAME):
            assert os.path.exists(os.path.join(out_dir, filename))
        with open(os.path.join(out_dir, REPORT_FILENAME)) as report_file:
            outputs.append(report_file.read())

    assert outputs[0] == outputs[1]


def test_analyze_granularity_option(
    runner: CliRunner, single_mode_filepath: str, tmp_path
) -> None:
    out_dir = str(tmp_path / "out")
    result = runner.invoke(
        cli.main, ["analyze", "-c", single_mode_filepath, "-o", out_dir, "-g", "4"]
    )
    assert result.exit_code == 0, result.output
    assert "g=4: 1 points" in result.output

    result = runner.invoke(
        cli.main, ["analyze", "-c", single_mode_filepath, "-o", out_dir, "-g", "9"]
    )
    assert result.exit_code == 2
    assert "granularities[0]" in result.output


def test_analyze_config_error(
    runner: CliRunner, single_mode_settings: dict, tmp_path
) -> None:
    settings = copy.deepcopy(single_mode_settings)
    settings["modes"][0]["service"]["upper"] = [1, 2, 1, 4]
    config_filepath = _write_config(tmp_path, settings)

    result = runner.invoke(cli.main, ["analyze", "-c", config_filepath])
    assert result.exit_code == 2
    assert "modes[0].service" in result.output


def test_analyze_full_buffer(
    runner: CliRunner, single_mode_settings: dict, tmp_path
) -> None:
    settings = copy.deepcopy(single_mode_settings)
    settings["arrival"] = {"lower": [1, 2, 3, 4], "upper": [1, 2, 3, 4]}
    settings["modes"][0]["service"] = {"lower": [2, 4, 6, 8], "upper": [2, 4, 6, 8]}
    settings["engine"] = {"state_budget": 200000, "horizon": 12, "max_backlog": 1}
    config_filepath = _write_config(tmp_path, settings)

    result = runner.invoke(
        cli.main, ["analyze", "-c", config_filepath, "-o", str(tmp_path / "out")]
    )
    assert result.exit_code == 2
    assert "max_backlog" in result.output


def test_analyze_budget_exhausted(
    runner: CliRunner, single_mode_filepath: str, tmp_path
) -> None:
    out_dir = str(tmp_path / "out")
    result = runner.invoke(
        cli.main,
        ["analyze", "-c", single_mode_filepath, "-o", out_dir, "--state-budget", "1"],
    )
    assert result.exit_code == 3
    assert "partial" in result.output
    with open(os.path.join(out_dir, REPORT_FILENAME)) as report_file:
        assert yaml.safe_load(report_file)["partial"] is True


def test_combine(runner: CliRunner, curve_filepath: str, tmp_path) -> None:
    out_dir = str(tmp_path / "combined")
    result = runner.invoke(
        cli.main, ["combine", "-c", "1", curve_filepath, "-o", out_dir]
    )
    assert result.exit_code == 0, result.output
    assert "k=1: lower 1 -> 1, upper 3 -> 3" in result.output
    assert Curve.from_file(os.path.join(out_dir, REFINED_FILENAME)) == Curve.from_file(
        curve_filepath
    )
    assert os.path.exists(os.path.join(out_dir, NAIVE_FILENAME))


def test_combine_contradiction(runner: CliRunner, tmp_path) -> None:
    path = str(tmp_path / "contradictory.csv")
    Curve([4, 4, 4], [5, 5, 5]).to_file(path)
    result = runner.invoke(
        cli.main, ["combine", "-c", "1", path, "-o", str(tmp_path / "out")]
    )
    assert result.exit_code == 4


def test_combine_bad_curve_file(runner: CliRunner, tmp_path) -> None:
    path = str(tmp_path / "bad.csv")
    with open(path, "w") as curve_file:
        curve_file.write("k,xi_lower,xi_upper\n1,4,3\n")

    result = runner.invoke(cli.main, ["combine", "-c", "1", path])
    assert result.exit_code == 2

    result = runner.invoke(cli.main, ["combine", "-c", "1", str(tmp_path / "none")])
    assert result.exit_code == 2


def test_oracle(runner: CliRunner, single_mode_filepath: str, tmp_path) -> None:
    out_dir = str(tmp_path / "oracle")
    result = runner.invoke(
        cli.main, ["oracle", "-c", single_mode_filepath, "-o", out_dir]
    )
    assert result.exit_code == 0, result.output
    assert result.output.startswith("k,xi_lower,xi_upper\n1,1,3\n")
    assert os.path.exists(os.path.join(out_dir, cli.ORACLE_FILENAME))

    result = runner.invoke(
        cli.main, ["oracle", "-c", single_mode_filepath, "--max-events", "9"]
    )
    assert result.exit_code == 5


def test_plot(runner: CliRunner, curve_filepath: str, tmp_path) -> None:
    result = runner.invoke(cli.main, ["plot"])
    assert result.exit_code == 2

    result = runner.invoke(cli.main, ["plot", curve_filepath, "-g", "1", "-g", "2"])
    assert result.exit_code == 2

    svg_filepath = str(tmp_path / "curves.svg")
    result = runner.invoke(
        cli.main, ["plot", curve_filepath, "-g", "1", "-o", svg_filepath]
    )
    assert result.exit_code == 0, result.output
    with open(svg_filepath) as svg_file:
        assert "<svg" in svg_file.read()


def test_sample(runner: CliRunner, curve_filepath: str, tmp_path) -> None:
    result = runner.invoke(cli.main, ["sample", "-c", curve_filepath, "-g", "2"])
    assert result.exit_code == 0, result.output
    assert result.output == "k,xi_lower,xi_upper\n1,3,5\n2,7,9\n"

    out_filepath = str(tmp_path / "sampled.csv")
    result = runner.invoke(
        cli.main, ["sample", "-c", curve_filepath, "-g", "4", "-o", out_filepath]
    )
    assert result.exit_code == 0
    assert Curve.from_file(out_filepath) == Curve([7], [9])

    result = runner.invoke(cli.main, ["sample", "-c", curve_filepath, "-g", "0"])
    assert result.exit_code == 2
