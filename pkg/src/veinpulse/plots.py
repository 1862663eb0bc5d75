"""Figure rendering for monitor runs.

Figures are written as SVG next to the CSV outputs; the derivative
trace with its peak markers is the one the heart rate is read from.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .hr import HeartRateResult, TrendSeries


def derivative_trace_figure(derivative: TrendSeries, result: HeartRateResult,
                            path: Path | str) -> Path:
    """Rate-of-change trace with one marker per counted heartbeat."""
    path = Path(path)
    t = np.arange(len(derivative)) / derivative.fps
    fig, ax = plt.subplots(figsize=(9, 3))
    ax.plot(t, derivative.values, lw=0.8, color="tab:blue")
    if result.peak_times:
        idx = np.rint(np.asarray(result.peak_times) * derivative.fps).astype(int)
        ax.plot(result.peak_times, derivative.values[idx], "v", ms=5,
                color="tab:red", label=f"{result.peak_count} peaks")
        ax.legend(loc="upper right", frameon=False)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("width rate of change (px/s)")
    ax.set_title(f"{result.bpm:.1f} bpm over {result.duration_s:.1f} s")
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def stages_figure(stages: dict[str, TrendSeries], path: Path | str) -> Path:
    """Stacked view of the width series through each smoothing stage."""
    path = Path(path)
    order = [s for s in ("raw", "smoothed", "sg", "derivative") if s in stages]
    fig, axes = plt.subplots(len(order), 1, figsize=(9, 2 * len(order)), sharex=True)
    if len(order) == 1:
        axes = [axes]
    for ax, name in zip(axes, order):
        series = stages[name]
        t = np.arange(len(series)) / series.fps
        ax.plot(t, series.values, lw=0.8)
        ax.set_ylabel(name)
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
    axes[-1].set_xlabel("time (s)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
