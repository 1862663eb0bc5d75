"""Finger-vein mapping and heart-rate monitoring from transillumination video."""

from .core import Frame, PipelineConfig, VideoSequence, denormalize, normalize_frame
from .errors import (
    DimensionError,
    EmptyMapError,
    FormatError,
    NoVesselError,
    ParameterError,
    PhantomSpecError,
    PipelineFailure,
    SequenceNotFoundError,
    TrackingFailureError,
    VeinPulseError,
)
from .hr import HeartRateResult, TrendSeries, count_peaks, differentiate, moving_average, savitzky_golay
from .ingest import SequenceManifest, load_sequence, read_pgm, read_png, write_pgm
from .morph import StructuringElement, dilate, erode, median_filter, open_map
from .pipeline import extract_frame, extract_sequence, monitor_sequence
from .roi import FingerMask, localize_finger
from .synth import PhantomSpec, PhantomTruth, VesselSpec, render_phantom, write_phantom
from .track import VesselRun, VesselSelection, WidthSeries, column_runs, select_vessel, width_series
from .veinmap import ScoreField, VeinMap, binarize, max_curvature, repeated_line_tracking

__version__ = "0.1.0"

__all__ = [
    "Frame",
    "PipelineConfig",
    "VideoSequence",
    "normalize_frame",
    "denormalize",
    "SequenceManifest",
    "load_sequence",
    "read_pgm",
    "read_png",
    "write_pgm",
    "FingerMask",
    "localize_finger",
    "ScoreField",
    "VeinMap",
    "max_curvature",
    "repeated_line_tracking",
    "binarize",
    "StructuringElement",
    "dilate",
    "erode",
    "open_map",
    "median_filter",
    "VesselRun",
    "VesselSelection",
    "WidthSeries",
    "column_runs",
    "select_vessel",
    "width_series",
    "TrendSeries",
    "HeartRateResult",
    "moving_average",
    "savitzky_golay",
    "differentiate",
    "count_peaks",
    "PhantomSpec",
    "PhantomTruth",
    "VesselSpec",
    "render_phantom",
    "write_phantom",
    "extract_frame",
    "extract_sequence",
    "monitor_sequence",
    "VeinPulseError",
    "DimensionError",
    "FormatError",
    "SequenceNotFoundError",
    "ParameterError",
    "PhantomSpecError",
    "PipelineFailure",
    "EmptyMapError",
    "NoVesselError",
    "TrackingFailureError",
]
