"""Fixtures shared by the test modules."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import os

import pytest
import yaml

from mta_rtc.config import SystemDescription, parse


@pytest.fixture
def this_dir() -> str:
    return os.path.dirname(__file__)


@pytest.fixture
def single_mode_filepath(this_dir: str) -> str:
    return os.path.join(this_dir, "single_mode.yaml")


@pytest.fixture
def single_mode_settings(single_mode_filepath: str) -> dict:
    with open(single_mode_filepath) as settings_file:
        settings = yaml.safe_load(settings_file)

    return settings


@pytest.fixture
def single_mode(single_mode_settings: dict) -> SystemDescription:
    return parse(single_mode_settings)
