"""Shared domain types, intensity normalization, and pipeline configuration.

Intensities live in [0, 1] as float64 throughout the pipeline; both
extraction algorithms differentiate intensity profiles, and integer
grids would leave the derivatives badly conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import DimensionError, ParameterError


@dataclass(frozen=True)
class Frame:
    """One grayscale image: a row-major float grid with values in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.size == 0:
            raise DimensionError(f"frame must be a nonempty 2-D grid, got shape {px.shape}")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ParameterError("frame intensities must lie in [0, 1]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class VideoSequence:
    """Ordered frames plus the capture rate; the pipeline input."""

    frames: tuple[Frame, ...]
    fps: float

    def __post_init__(self):
        if self.fps <= 0:
            raise ParameterError(f"fps must be positive, got {self.fps}")
        frames = tuple(self.frames)
        if frames:
            h, w = frames[0].height, frames[0].width
            for i, f in enumerate(frames):
                if (f.height, f.width) != (h, w):
                    raise DimensionError(
                        f"frame {i} is {f.width}x{f.height}, expected {w}x{h}"
                    )
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def duration_s(self) -> float:
        return len(self.frames) / self.fps


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the pipeline in one immutable object.

    Defaults are the frozen values used by the CLI; a run report echoes
    the full effective config so results can be reproduced bit-for-bit.
    peak_min_prominence of None means 0.25x the interquartile range of
    the series, resolved at peak-counting time.
    """

    curvature_sigma: float = 3.0
    rlt_iterations: int = 3000
    rlt_valley_radius: float = 5.0
    binarize_percentile: float = 80.0
    morph_radius: int = 1
    median_window: int = 5
    sg_window: int = 11
    sg_order: int = 3
    peak_min_prominence: float | None = None
    peak_min_separation_s: float = 0.33
    central_band_fraction: float = 0.5
    vertical_profiles_only: bool = False
    rlt_median_last: bool = False
    average_columns: bool = False
    peaks_on_sg: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.curvature_sigma < 1:
            raise ParameterError("curvature_sigma must be >= 1")
        if self.rlt_iterations < 0:
            raise ParameterError("rlt_iterations must be >= 0")
        if not 0 < self.binarize_percentile < 100:
            raise ParameterError("binarize_percentile must lie in (0, 100)")
        if self.morph_radius < 1:
            raise ParameterError("morph_radius must be >= 1")
        if self.median_window % 2 == 0 or self.median_window < 3:
            raise ParameterError("median_window must be odd and >= 3")
        if self.sg_window % 2 == 0 or self.sg_window < 3:
            raise ParameterError("sg_window must be odd and >= 3")
        if self.sg_order >= self.sg_window:
            raise ParameterError("sg_order must be < sg_window")
        if self.peak_min_separation_s <= 0:
            raise ParameterError("peak_min_separation_s must be positive")
        if not 0 < self.central_band_fraction <= 1:
            raise ParameterError("central_band_fraction must lie in (0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict) -> "PipelineConfig":
        known = {f: values[f] for f in cls.__dataclass_fields__ if f in values}
        unknown = set(values) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)


def normalize_frame(raw) -> Frame:
    """Map an 8-bit grid onto a [0, 1] float Frame (each pixel raw/255)."""
    try:
        arr = np.asarray(raw)
    except ValueError as exc:  # ragged nested sequence
        raise DimensionError("raw input must be a rectangular grid") from exc
    if arr.dtype == object or arr.ndim != 2 or arr.size == 0:
        raise DimensionError("raw input must be a nonempty rectangular grid")
    arr = arr.astype(np.float64)
    if arr.min() < 0 or arr.max() > 255:
        raise ParameterError("raw intensities must lie in [0, 255]")
    return Frame(arr / 255.0)


def denormalize(frame: Frame) -> np.ndarray:
    """Map a Frame back onto an 8-bit grid (round(pixel * 255))."""
    return np.rint(frame.pixels * 255.0).astype(np.uint8)
