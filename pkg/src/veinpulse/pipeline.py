"""End-to-end orchestration of the extraction and monitoring workflow.

Per-frame work (mask, score field, binarization, post-processing) is
independent across frames and can run on a thread pool capped by the
VEINPULSE_THREADS environment variable; results keep frame order either
way. The matching pass over frames and the series stages are sequential.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import hr, morph, track, veinmap
from .core import Frame, PipelineConfig, VideoSequence
from .errors import ParameterError
from .roi import FingerMask, localize_finger

METHOD_MAX_CURVATURE = "maxcurv"
METHOD_LINE_TRACKING = "rlt"
METHODS = (METHOD_MAX_CURVATURE, METHOD_LINE_TRACKING)

# Pre-smoothing window applied before the Savitzky-Golay stage.
MA_WINDOW = 5

# Reported heart rates below this are treated as a noise floor, not a pulse.
MIN_PLAUSIBLE_BPM = 40.0


@dataclass(frozen=True)
class FrameExtraction:
    mask: FingerMask
    field: veinmap.ScoreField
    raw_map: veinmap.VeinMap
    post_map: veinmap.VeinMap


@dataclass(frozen=True)
class MonitorOutput:
    series: track.WidthSeries
    stages: dict[str, hr.TrendSeries]
    result: hr.HeartRateResult
    warnings: tuple[str, ...]


def thread_count() -> int:
    value = os.environ.get("VEINPULSE_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def frame_seed(seed: int, frame_idx: int) -> int:
    """Stable per-frame seed so walks stay independent across frames."""
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(frame_idx,)).generate_state(1)[0])


def extract_frame(frame: Frame, config: PipelineConfig, method: str,
                  frame_idx: int = 0) -> FrameExtraction:
    """Mask, score, binarize, and post-process one frame."""
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}, expected one of {METHODS}")
    mask = localize_finger(frame)
    if method == METHOD_MAX_CURVATURE:
        field = veinmap.max_curvature(
            frame, mask, config.curvature_sigma, vertical_only=config.vertical_profiles_only
        )
    else:
        field = veinmap.repeated_line_tracking(
            frame, mask, config.rlt_iterations, config.rlt_valley_radius,
            seed=frame_seed(config.seed, frame_idx),
        )
    raw_map = veinmap.binarize(field, config.binarize_percentile)
    if method == METHOD_MAX_CURVATURE:
        post_map = morph.postprocess_max_curvature(raw_map, config)
    else:
        post_map = morph.postprocess_line_tracking(raw_map, config)
    return FrameExtraction(mask=mask, field=field, raw_map=raw_map, post_map=post_map)


def extract_sequence(seq: VideoSequence, config: PipelineConfig, method: str) -> list[FrameExtraction]:
    """Run extract_frame over the whole sequence, in frame order."""
    threads = thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(
                lambda item: extract_frame(item[1], config, method, item[0]),
                enumerate(seq.frames),
            ))
    return [extract_frame(f, config, method, i) for i, f in enumerate(seq.frames)]


def monitor_sequence(seq: VideoSequence, config: PipelineConfig, method: str,
                     extractions: list[FrameExtraction] | None = None) -> MonitorOutput:
    """Full heart-rate workflow: extraction, width tracking, trend analysis."""
    if extractions is None:
        extractions = extract_sequence(seq, config, method)
    series = track.width_series(
        [e.post_map for e in extractions],
        fps=seq.fps,
        band_fraction=config.central_band_fraction,
        eligible_columns=[e.mask.profile_columns() for e in extractions],
        average_columns=config.average_columns,
    )

    raw = hr.TrendSeries(series.widths, fps=seq.fps, stage=hr.STAGE_RAW)
    smoothed = hr.moving_average(raw, MA_WINDOW)
    sg = hr.savitzky_golay(smoothed, config.sg_window, config.sg_order)
    derivative = hr.differentiate(sg)
    stages = {s.stage: s for s in (raw, smoothed, sg, derivative)}

    counted = sg if config.peaks_on_sg else derivative
    result = hr.count_peaks(counted, config.peak_min_prominence, config.peak_min_separation_s)

    warnings = []
    if result.bpm < MIN_PLAUSIBLE_BPM:
        warnings.append(
            f"reported rate {result.bpm:.1f} bpm is below the physiologic band "
            f"({MIN_PLAUSIBLE_BPM:.0f} bpm); peaks are likely a noise floor"
        )
    gap_count = int(series.gaps.sum())
    if gap_count:
        warnings.append(f"{gap_count} of {series.frames_total} frames gap-filled")
    return MonitorOutput(series=series, stages=stages, result=result, warnings=tuple(warnings))
