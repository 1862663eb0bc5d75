"""Width series to heart rate: smooth, Savitzky-Golay, differentiate,
count peaks.

The rate-of-change series is deliberately left as is; it is not fitted
to a sinusoid, so the natural vessel-size variations stay visible in
the output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, peak_prominences, savgol_filter

from .errors import ParameterError

# Default prominence floor: scale-free fraction of the series spread.
PROMINENCE_IQR_FACTOR = 0.25

STAGE_RAW = "raw"
STAGE_SMOOTHED = "smoothed"
STAGE_SG = "sg"
STAGE_DERIVATIVE = "derivative"


@dataclass(frozen=True)
class TrendSeries:
    """A per-frame signal at one stage of the smoothing chain."""

    values: np.ndarray
    fps: float
    stage: str = STAGE_RAW

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise ParameterError("series values must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def duration_s(self) -> float:
        return len(self.values) / self.fps


@dataclass(frozen=True)
class HeartRateResult:
    peak_times: tuple[float, ...]
    peak_count: int
    duration_s: float
    bpm: float


def moving_average(series: TrendSeries, window: int) -> TrendSeries:
    """Centered mean with edge replication; length preserved."""
    if window % 2 == 0 or window < 1:
        raise ParameterError(f"window must be odd and >= 1, got {window}")
    if window > len(series):
        raise ParameterError(f"window {window} exceeds series length {len(series)}")
    if window == 1:
        return TrendSeries(series.values.copy(), series.fps, STAGE_SMOOTHED)
    half = window // 2
    padded = np.pad(series.values, half, mode="edge")
    out = np.convolve(padded, np.full(window, 1.0 / window), mode="valid")
    return TrendSeries(out, series.fps, STAGE_SMOOTHED)


def savitzky_golay(series: TrendSeries, window: int, order: int) -> TrendSeries:
    """Least-squares local polynomial smoothing.

    Each sample becomes the center value of the polynomial fitted over
    its window; at the edges the first/last full window's polynomial is
    evaluated at the edge offsets, so polynomial inputs of degree up to
    order pass through unchanged.
    """
    if window % 2 == 0 or window < 3:
        raise ParameterError(f"window must be odd and >= 3, got {window}")
    if order >= window:
        raise ParameterError(f"order {order} must be < window {window}")
    if window > len(series):
        raise ParameterError(f"window {window} exceeds series length {len(series)}")
    out = savgol_filter(series.values, window_length=window, polyorder=order, mode="interp")
    return TrendSeries(out, series.fps, STAGE_SG)


def differentiate(series: TrendSeries) -> TrendSeries:
    """Central-difference rate of change in px/s (one-sided at the ends)."""
    if len(series) < 3:
        raise ParameterError("differentiate needs at least 3 samples")
    out = np.gradient(series.values) * series.fps
    return TrendSeries(out, series.fps, STAGE_DERIVATIVE)


def default_prominence(values: np.ndarray) -> float:
    """Scale-free prominence floor: 0.25 x interquartile range."""
    q1, q3 = np.percentile(values, [25, 75])
    return PROMINENCE_IQR_FACTOR * float(q3 - q1)


def count_peaks(series: TrendSeries, min_prominence: float | None,
                min_separation_s: float) -> HeartRateResult:
    """Count heartbeat peaks and convert to beats per minute.

    Local maxima with topographic prominence >= min_prominence are kept
    greedily in descending-prominence order, subject to pairwise
    separation >= min_separation_s. A prominence of None resolves to
    0.25 x the interquartile range of the series. Duration is the
    capture wall time, so bpm = peaks * 60 / duration.
    """
    if min_separation_s <= 0:
        raise ParameterError("min_separation_s must be positive")
    values = series.values
    if min_prominence is None:
        min_prominence = default_prominence(values)

    candidates, _ = find_peaks(values)
    kept: list[int] = []
    if candidates.size:
        prominences = peak_prominences(values, candidates)[0]
        passing = prominences >= min_prominence
        candidates, prominences = candidates[passing], prominences[passing]
        # Greedy: strongest prominence first, index breaks exact ties.
        order = np.lexsort((candidates, -prominences))
        min_sep_frames = min_separation_s * series.fps
        for idx in candidates[order]:
            if all(abs(idx - k) >= min_sep_frames for k in kept):
                kept.append(int(idx))
    kept.sort()

    duration_s = series.duration_s
    peak_times = tuple(i / series.fps for i in kept)
    return HeartRateResult(
        peak_times=peak_times,
        peak_count=len(kept),
        duration_s=duration_s,
        bpm=len(kept) * 60.0 / duration_s,
    )
