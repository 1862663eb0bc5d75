"""Synthetic transillumination phantom generator.

Stands in for participant data as the pipeline's ground-truth oracle: a
bright tissue band over dark background, dark vessel bands whose width
breathes sinusoidally at a set pulse rate, horizontal scene jitter, and
sensor noise. Purely geometric intensity modelling; no light transport.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .core import Frame, VideoSequence
from .errors import PhantomSpecError
from .ingest import write_pgm

# Edge softness of the rendered geometry, px.
BAND_EDGE_SIGMA = 2.0
VESSEL_EDGE_SIGMA = 1.0


@dataclass(frozen=True)
class VesselSpec:
    """One vessel: a dark band through (center_row, anchor_col).

    Near-horizontal vessels (|orientation| <= 45 deg) modulate their
    vertical thickness; steeper ones their horizontal thickness.
    anchor_col of None means the frame's center column.
    """

    center_row: float
    base_width: float
    modulation_amplitude: float = 0.0
    orientation_deg: float = 0.0
    anchor_col: float | None = None


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 128
    height: int = 80
    fps: float = 30.0
    duration_s: float = 60.0
    band_top: int = 12
    band_bottom: int = 67
    vessels: tuple[VesselSpec, ...] = (VesselSpec(center_row=40.0, base_width=6.0, modulation_amplitude=2.0),)
    pulse_bpm: float = 77.0
    background_level: float = 0.05
    tissue_level: float = 0.85
    vessel_level: float = 0.30
    noise_sigma: float = 0.02
    jitter_px_per_frame: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vessels", tuple(self.vessels))
        if not 0 <= self.band_top < self.band_bottom < self.height:
            raise PhantomSpecError("finger_band: band must satisfy 0 <= top < bottom < height")
        if not self.vessel_level < self.tissue_level:
            raise PhantomSpecError("vessel_level: must be darker than tissue_level")
        if not 40 <= self.pulse_bpm <= 180:
            raise PhantomSpecError("pulse_bpm: must lie in [40, 180]")
        if self.fps <= 0 or self.duration_s <= 0:
            raise PhantomSpecError("fps: fps and duration_s must be positive")
        for lvl in ("background_level", "tissue_level", "vessel_level"):
            if not 0.0 <= getattr(self, lvl) <= 1.0:
                raise PhantomSpecError(f"{lvl}: must lie in [0, 1]")
        for v in self.vessels:
            if v.base_width < 1:
                raise PhantomSpecError("vessels: base_width must be >= 1 px")
            if abs(v.orientation_deg) <= 45.0:
                reach = (v.base_width + abs(v.modulation_amplitude)) / 2.0 + 1.0
                if v.center_row - reach < self.band_top or v.center_row + reach > self.band_bottom:
                    raise PhantomSpecError("vessels: vessel band exceeds the finger band")
            elif not 0 <= (self.width / 2 if v.anchor_col is None else v.anchor_col) < self.width:
                raise PhantomSpecError("vessels: anchor column outside the frame")

    @property
    def n_frames(self) -> int:
        return int(round(self.duration_s * self.fps))

    @property
    def pulse_hz(self) -> float:
        return self.pulse_bpm / 60.0


@dataclass(frozen=True)
class PhantomTruth:
    """What the phantom actually drew, frame by frame."""

    spec: PhantomSpec
    widths: np.ndarray        # (n_frames, n_vessels) unrounded modulated width
    widths_px: np.ndarray     # (n_frames, n_vessels) drawn integer width
    shifts: np.ndarray        # (n_frames,) cumulative horizontal jitter

    @property
    def modulation_cycles(self) -> float:
        return self.spec.pulse_hz * self.spec.duration_s

    def vessel_mask(self, frame_idx: int, vessel_idx: int | None = None) -> np.ndarray:
        """Drawn (pre-blur) vessel pixels of one frame."""
        spec = self.spec
        mask = np.zeros((spec.height, spec.width), dtype=bool)
        vessels = spec.vessels if vessel_idx is None else (spec.vessels[vessel_idx],)
        indices = range(len(spec.vessels)) if vessel_idx is None else (vessel_idx,)
        for v, vi in zip(vessels, indices):
            w_px = int(self.widths_px[frame_idx, vi])
            mask |= _vessel_indicator(spec, v, w_px, self.shifts[frame_idx])
        return mask

    def centerline_mask(self, frame_idx: int, vessel_idx: int | None = None) -> np.ndarray:
        """Exact drawn centerline pixels of one frame."""
        spec = self.spec
        mask = np.zeros((spec.height, spec.width), dtype=bool)
        vessels = spec.vessels if vessel_idx is None else (spec.vessels[vessel_idx],)
        for v in vessels:
            mask |= _vessel_indicator(spec, v, 1, self.shifts[frame_idx])
        return mask


def _vessel_indicator(spec: PhantomSpec, v: VesselSpec, w_px: int, shift: float) -> np.ndarray:
    """Integer-width vessel band, clipped to the finger band rows."""
    anchor_col = spec.width / 2.0 if v.anchor_col is None else v.anchor_col
    theta = math.radians(v.orientation_deg)
    out = np.zeros((spec.height, spec.width), dtype=bool)
    if abs(v.orientation_deg) <= 45.0:
        # Column-parameterized: w_px consecutive rows centred on the line.
        x = np.arange(spec.width)
        c = v.center_row + math.tan(theta) * (x - anchor_col - shift)
        top = np.rint(c - (w_px - 1) / 2.0).astype(int)
        rows = np.arange(spec.height)[:, None]
        out = (rows >= top[None, :]) & (rows < (top + w_px)[None, :])
    else:
        y = np.arange(spec.height)
        c = anchor_col + shift + (y - v.center_row) / math.tan(theta)
        left = np.rint(c - (w_px - 1) / 2.0).astype(int)
        cols = np.arange(spec.width)[None, :]
        out = (cols >= left[:, None]) & (cols < (left + w_px)[:, None])
    out[: spec.band_top] = False
    out[spec.band_bottom + 1:] = False
    return out


def render_phantom(spec: PhantomSpec) -> tuple[VideoSequence, PhantomTruth]:
    """Render the sequence plus its exact per-frame ground truth."""
    n_frames = spec.n_frames
    n_vessels = len(spec.vessels)
    master = np.random.SeedSequence(spec.seed)
    jitter_ss, *frame_ss = master.spawn(n_frames + 1)

    jitter_rng = np.random.Generator(np.random.PCG64(jitter_ss))
    steps = jitter_rng.uniform(-spec.jitter_px_per_frame, spec.jitter_px_per_frame, size=n_frames)
    steps[0] = 0.0
    shifts = np.cumsum(steps)

    t = np.arange(n_frames) / spec.fps
    widths = np.empty((n_frames, n_vessels))
    for vi, v in enumerate(spec.vessels):
        widths[:, vi] = v.base_width + v.modulation_amplitude * np.sin(
            2.0 * math.pi * spec.pulse_hz * t
        )
    widths_px = np.maximum(1, np.rint(widths).astype(int))

    # Static tissue band profile with soft edges, shared by all frames.
    band = np.zeros(spec.height)
    band[spec.band_top: spec.band_bottom + 1] = 1.0
    band = gaussian_filter1d(band, BAND_EDGE_SIGMA)
    base = spec.background_level + (spec.tissue_level - spec.background_level) * band
    base = np.repeat(base[:, None], spec.width, axis=1)

    depth = spec.tissue_level - spec.vessel_level
    frames = []
    for i in range(n_frames):
        img = base.copy()
        for vi, v in enumerate(spec.vessels):
            ind = _vessel_indicator(spec, v, int(widths_px[i, vi]), shifts[i]).astype(np.float64)
            ind = gaussian_filter1d(ind, VESSEL_EDGE_SIGMA, axis=0 if abs(v.orientation_deg) <= 45 else 1)
            img -= depth * ind
        if spec.noise_sigma > 0:
            rng = np.random.Generator(np.random.PCG64(frame_ss[i]))
            img += rng.normal(0.0, spec.noise_sigma, size=img.shape)
        frames.append(Frame(np.clip(img, 0.0, 1.0)))

    truth = PhantomTruth(spec=spec, widths=widths, widths_px=widths_px, shifts=shifts)
    return VideoSequence(frames=tuple(frames), fps=spec.fps), truth


def write_phantom(spec: PhantomSpec, out_dir: Path | str) -> tuple[Path, PhantomTruth]:
    """Render and write frames, ground-truth CSV, and centerline masks.

    Layout: out_dir/frames/f0000.pgm..., out_dir/truth.csv,
    out_dir/centerlines/c0000.pgm...
    """
    out_dir = Path(out_dir)
    frames_dir = out_dir / "frames"
    lines_dir = out_dir / "centerlines"
    frames_dir.mkdir(parents=True, exist_ok=True)
    lines_dir.mkdir(parents=True, exist_ok=True)

    seq, truth = render_phantom(spec)
    for i, frame in enumerate(seq.frames):
        write_pgm(frames_dir / f"f{i:04d}.pgm", np.rint(frame.pixels * 255).astype(np.uint8))
        write_pgm(lines_dir / f"c{i:04d}.pgm", truth.centerline_mask(i).astype(np.uint8) * 255)

    with open(out_dir / "truth.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["frame_index", "time_s", "shift_px"]
        for vi in range(len(spec.vessels)):
            header += [f"width_v{vi}", f"width_px_v{vi}"]
        writer.writerow(header)
        for i in range(spec.n_frames):
            row = [i, f"{i / spec.fps:.6f}", f"{truth.shifts[i]:.4f}"]
            for vi in range(len(spec.vessels)):
                row += [f"{truth.widths[i, vi]:.4f}", int(truth.widths_px[i, vi])]
            writer.writerow(row)
    return frames_dir, truth
