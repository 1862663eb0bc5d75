"""Vessel localization in binary maps and the per-frame width series.

Every frame is treated as an individual image: runs are re-detected
from scratch each frame and matched to the monitored vessel only by
center-row proximity at the reference column, which is what keeps the
series usable when the finger moves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoVesselError, TrackingFailureError
from .veinmap import VeinMap

# Matching gate between consecutive frames and the tolerated fraction
# of frames that may lose the vessel before the run is declared failed.
MATCH_GATE_PX = 15
MAX_GAP_FRACTION = 0.20

# Half-extent of the column neighborhood used by the 5-column average.
AVG_COLUMN_REACH = 2


@dataclass(frozen=True)
class VesselRun:
    """One contiguous vertical foreground run at a column."""

    column: int
    center_row: float
    width: int


@dataclass(frozen=True)
class VesselSelection:
    """The monitored vessel: where it was picked and its nominal size."""

    column: int
    center_row: float
    width: int


@dataclass(frozen=True)
class WidthSeries:
    """Per-frame vessel width in pixels; the cardiac signal carrier."""

    widths: np.ndarray
    gaps: np.ndarray
    fps: float

    @property
    def frames_total(self) -> int:
        return len(self.widths)

    @property
    def duration_s(self) -> float:
        return self.frames_total / self.fps


def column_runs(vein_map: VeinMap, column: int) -> list[VesselRun]:
    """Maximal contiguous foreground runs at one column, top to bottom."""
    col = vein_map.vein[:, column]
    if not col.any():
        return []
    padded = np.concatenate(([False], col, [False]))
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    starts, stops = edges[::2], edges[1::2]
    return [
        VesselRun(column=column, center_row=(a + b - 1) / 2.0, width=int(b - a))
        for a, b in zip(starts, stops)
    ]


def central_band_columns(width: int, band_fraction: float,
                         eligible: np.ndarray | None = None) -> np.ndarray:
    """The middle band_fraction of columns, optionally intersected with
    the columns the finger mask deems usable."""
    half = width * band_fraction / 2.0
    lo = int(np.floor(width / 2.0 - half))
    hi = int(np.ceil(width / 2.0 + half))
    band = np.arange(max(0, lo), min(width, hi))
    if eligible is not None:
        band = np.intersect1d(band, eligible)
    return band


def select_vessel(vein_map: VeinMap, band_fraction: float,
                  eligible_columns: np.ndarray | None = None) -> VesselSelection:
    """Pick the monitored vessel from runs inside the central band.

    The run whose width is the (lower) median of candidate widths wins;
    ties go to the run nearest the image's vertical center, then to the
    smaller row index.
    """
    band = central_band_columns(vein_map.width, band_fraction, eligible_columns)
    runs = [r for c in band for r in column_runs(vein_map, int(c))]
    if not runs:
        raise NoVesselError("no vessel run inside the central band")
    widths = sorted(r.width for r in runs)
    median_width = widths[(len(widths) - 1) // 2]
    mid_row = (vein_map.height - 1) / 2.0
    best = min(
        (r for r in runs if r.width == median_width),
        key=lambda r: (abs(r.center_row - mid_row), r.center_row),
    )
    return VesselSelection(column=best.column, center_row=best.center_row, width=best.width)


def _match_run(vein_map: VeinMap, column: int, prev_center: float,
               gate: float) -> VesselRun | None:
    candidates = [r for r in column_runs(vein_map, column)
                  if abs(r.center_row - prev_center) <= gate]
    if not candidates:
        return None
    return min(candidates, key=lambda r: abs(r.center_row - prev_center))


def width_series(maps: list[VeinMap], fps: float, band_fraction: float = 0.5,
                 eligible_columns: list[np.ndarray] | None = None,
                 gate: float | None = MATCH_GATE_PX,
                 average_columns: bool = False) -> WidthSeries:
    """Track the selected vessel's width across frames.

    The first frame that yields a selection fixes the reference column;
    afterwards each frame independently re-detects runs there and the
    nearest one within the gate is taken. Frames with no match are
    marked as gaps and linearly interpolated afterwards; more than
    MAX_GAP_FRACTION of gaps raises TrackingFailureError. gate=None
    switches to pure per-frame mode: every frame runs selection from
    scratch with no frame-to-frame state.
    """
    if not maps:
        raise NoVesselError("width_series needs at least one map")
    n = len(maps)
    widths = np.full(n, np.nan)
    gaps = np.ones(n, dtype=bool)

    if gate is None:
        for i, m in enumerate(maps):
            cols = eligible_columns[i] if eligible_columns else None
            try:
                sel = select_vessel(m, band_fraction, cols)
            except NoVesselError:
                continue
            widths[i] = sel.width
            gaps[i] = False
    else:
        ref_column: int | None = None
        prev_center = 0.0
        for i, m in enumerate(maps):
            if ref_column is None:
                cols = eligible_columns[i] if eligible_columns else None
                try:
                    sel = select_vessel(m, band_fraction, cols)
                except NoVesselError:
                    continue
                ref_column, prev_center = sel.column, sel.center_row
                widths[i] = sel.width
                gaps[i] = False
                continue
            if average_columns:
                lo = max(0, ref_column - AVG_COLUMN_REACH)
                hi = min(m.width, ref_column + AVG_COLUMN_REACH + 1)
                matched = [r for c in range(lo, hi)
                           if (r := _match_run(m, c, prev_center, gate)) is not None]
                if matched:
                    widths[i] = float(np.mean([r.width for r in matched]))
                    gaps[i] = False
                    anchor = next((r for r in matched if r.column == ref_column), None)
                    prev_center = anchor.center_row if anchor else float(
                        np.mean([r.center_row for r in matched]))
            else:
                run = _match_run(m, ref_column, prev_center, gate)
                if run is not None:
                    widths[i] = run.width
                    gaps[i] = False
                    prev_center = run.center_row

    gap_count = int(gaps.sum())
    if gap_count > MAX_GAP_FRACTION * n:
        raise TrackingFailureError(
            f"lost the vessel in {gap_count} of {n} frames "
            f"({100.0 * gap_count / n:.1f}% > {100 * MAX_GAP_FRACTION:.0f}% budget)",
            gap_count=gap_count,
            frames_total=n,
        )
    if gap_count:
        present = np.flatnonzero(~gaps)
        widths = np.interp(np.arange(n), present, widths[present])
    return WidthSeries(widths=widths, gaps=gaps, fps=fps)
