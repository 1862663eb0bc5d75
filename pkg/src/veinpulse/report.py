"""Run reports and delimited outputs.

A report carries the full effective config next to every output path,
so any run can be reproduced bit-for-bit by feeding the report back to
the CLI as --config.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .hr import HeartRateResult, TrendSeries
from .track import WidthSeries


@dataclass
class RunReport:
    command: str
    method: str | None
    config: dict
    outputs: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)
    heart_rate: dict | None = None
    warnings: list = field(default_factory=list)

    def write(self, path: Path | str) -> Path:
        path = Path(path)
        path.write_text(json.dumps(asdict(self), indent=2) + "\n")
        return path


def heart_rate_summary(result: HeartRateResult) -> dict:
    return {
        "peak_count": result.peak_count,
        "duration_s": round(result.duration_s, 6),
        "bpm": round(result.bpm, 4),
    }


def summary_line(result: HeartRateResult) -> str:
    return (
        f"peak_count={result.peak_count} "
        f"duration_s={result.duration_s:.2f} "
        f"bpm={result.bpm:.1f}"
    )


def write_width_csv(path: Path | str, series: WidthSeries) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "time_s", "width_px", "gap_flag"])
        for i, (w, gap) in enumerate(zip(series.widths, series.gaps)):
            writer.writerow([i, f"{i / series.fps:.6f}", f"{w:.4f}", int(gap)])
    return path


def write_stage_csv(path: Path | str, series: TrendSeries) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "time_s", series.stage])
        for i, v in enumerate(series.values):
            writer.writerow([i, f"{i / series.fps:.6f}", f"{v:.6f}"])
    return path


def write_peaks_csv(path: Path | str, result: HeartRateResult) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["peak_time_s"])
        for t in result.peak_times:
            writer.writerow([f"{t:.6f}"])
    return path
