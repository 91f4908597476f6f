"""Tests for system descriptions."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import copy
import dataclasses
import os

import pytest

from mta_rtc.config import (
    DATA_DIR,
    ConfigError,
    SystemDescription,
    check_granularities,
    parse,
    parse_config_file,
)
from mta_rtc.curves import INF, Curve
from mta_rtc.mta import TransitionKind


@pytest.mark.parametrize("config_filename", ["pmc_example.yaml", "pmc_tiny.yaml"])
def test_parse_bundled_descriptions(config_filename: str) -> None:
    desc = parse_config_file(os.path.join(DATA_DIR, config_filename))
    assert [mode.name for mode in desc.mta.modes] == ["sleep", "run"]
    assert desc.mta.initial == "sleep"
    assert desc.arrival.n >= desc.n


def test_parse_example() -> None:
    desc = parse_config_file(os.path.join(DATA_DIR, "pmc_example.yaml"))
    assert desc.n == 24
    assert desc.granularities == (2, 3, 4)

    sleep, run = desc.mta.modes
    assert sleep.service is None
    assert sleep.buf_high == 4
    assert sleep.buf_low == -INF
    assert sleep.transitions[0].kind is TransitionKind.BUFFER_ABOVE
    assert run.service.point(1) == (1, 2)
    assert desc.engine.horizon == 60


def test_parse_defaults(single_mode: SystemDescription) -> None:
    assert single_mode.engine.max_backlog == 16
    assert single_mode.engine.jobs == 1
    assert single_mode.output_dir == "results"
    assert single_mode.channels == {}
    assert single_mode.mta.initial_backlog == 0


def _error_field(settings: dict) -> str:
    with pytest.raises(ConfigError) as exc_info:
        parse(settings)
    return exc_info.value.field


@pytest.mark.parametrize(
    "path,value,field",
    [
        (("n",), "four", "n"),
        (("n",), 0, "n"),
        (("arrival", "lower"), [2, 4, 5, 3], "arrival"),
        (("arrival", "upper"), [2, 4], "arrival"),
        (("modes", 0, "name"), None, "modes[0].name"),
        (("modes", 0, "speed"), 3, "modes[0].speed"),
        (("modes", 0, "service", "lower"), [1, 2, "x", 4], "modes[0].service.lower"),
        (("initial",), "sleep", "initial"),
        (("granularities",), [2, 2], "granularities[1]"),
        (("granularities",), [5], "granularities[0]"),
        (("engine", "horizon"), -1, "engine.horizon"),
        (("engine", "jobs"), 0, "engine.jobs"),
    ],
)
def test_config_errors(single_mode_settings: dict, path, value, field: str) -> None:
    settings = copy.deepcopy(single_mode_settings)
    node = settings
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value
    assert _error_field(settings) == field


def test_missing_field(single_mode_settings: dict) -> None:
    settings = copy.deepcopy(single_mode_settings)
    del settings["arrival"]["upper"]
    assert _error_field(settings) == "arrival.upper"


def test_bad_transition_kind(single_mode_settings: dict) -> None:
    settings = copy.deepcopy(single_mode_settings)
    settings["modes"][0]["transitions"] = [{"kind": "sideways", "target": "run"}]
    assert _error_field(settings) == "modes[0].transitions[0].kind"


def test_channels(single_mode_settings: dict) -> None:
    settings = copy.deepcopy(single_mode_settings)
    settings["channels"] = {"wake": None, "tick": {"lower": [5], "upper": [5]}}
    desc = parse(settings)
    assert desc.channels == {"wake": None, "tick": Curve([5], [5])}
    assert desc.mta.channels == ("wake", "tick")


def test_granularity_beyond_service(single_mode: SystemDescription) -> None:
    run = dataclasses.replace(single_mode.mta.modes[0], service=Curve([1], [1]))
    m = dataclasses.replace(single_mode.mta, modes=(run,))
    desc = dataclasses.replace(single_mode, mta=m)
    with pytest.raises(ConfigError) as exc_info:
        check_granularities(desc)
    assert "service" in str(exc_info.value)


def test_unreadable_files(tmp_path) -> None:
    with pytest.raises(ConfigError):
        parse_config_file(str(tmp_path / "missing.yaml"))

    bad_filepath = tmp_path / "bad.yaml"
    bad_filepath.write_text("n: [1,\n")
    with pytest.raises(ConfigError):
        parse_config_file(str(bad_filepath))

    list_filepath = tmp_path / "list.yaml"
    list_filepath.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        parse_config_file(str(list_filepath))
