"""Top-level package for mta_rtc_granularity."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
