"""Staircase plots of interval-length curves."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import logging
import math
from typing import Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .curves import Curve, rescale  # noqa: E402

log = logging.getLogger(__name__)

# Fixed hash salt keeps SVG element ids stable between runs
matplotlib.rcParams["svg.hashsalt"] = "mta_rtc"
matplotlib.rcParams["svg.fonttype"] = "none"


class PlotError(Exception):
    """Base error for plotting"""


def _finite(values: Sequence[float], ceiling: float) -> np.ndarray:
    return np.array([ceiling if math.isinf(v) else v for v in values], dtype=float)


def plot_curves(
    curves: Sequence[Tuple[str, Curve]],
    out_filepath: str,
    granularities: Optional[Sequence[int]] = None,
    title: str = "Interval-length curves",
) -> None:
    """One lower/upper staircase pair per labelled curve.

    With ``granularities`` each curve is drawn on fine event indices, point k
    of a curve at granularity g placed at g*k. Unbounded entries are clipped
    to the top of the plot.
    """
    if not curves:
        raise PlotError("Nothing to plot")

    if granularities is None:
        granularities = [1] * len(curves)
    if len(granularities) != len(curves):
        raise PlotError("One granularity per curve is needed")

    finite = [
        v
        for _, c in curves
        for v in c.lower + c.upper
        if not math.isinf(v)
    ]
    ceiling = max(finite, default=1) * 1.1 + 1

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    colours = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, ((label, c), g) in enumerate(zip(curves, granularities)):
        points = rescale(c, g)
        ks = np.array([k for k, _, _ in points])
        colour = colours[i % len(colours)]
        ax.step(
            ks,
            _finite([lo for _, lo, _ in points], ceiling),
            where="post",
            color=colour,
            label=f"{label} (lower)",
        )
        ax.step(
            ks,
            _finite([up for _, _, up in points], ceiling),
            where="post",
            color=colour,
            linestyle="--",
            label=f"{label} (upper)",
        )

    ax.set_xlabel("Number of events k")
    ax.set_ylabel("Interval length")
    ax.set_ylim(0, ceiling)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()

    fig.savefig(out_filepath, format="svg", metadata={"Date": None})
    plt.close(fig)
    log.info("Wrote plot of %d curves to %s", len(curves), out_filepath)
