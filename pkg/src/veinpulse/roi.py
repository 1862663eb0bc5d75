"""Localize the finger against the dark background, column by column.

The finger is transilluminated, so tissue is bright and background dark.
Each column gets an upper and lower boundary from a two-block vertical
step detector; extraction and profile measurements run only between them.
Recomputed per frame: every frame is treated as an individual image, so
the mask follows any finger motion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Frame
from .errors import DimensionError

# Detector block height; small relative to any plausible finger height.
DEFAULT_EDGE_HALF_HEIGHT = 4

# Columns whose inside run is shorter than this carry no usable
# cross-section and are excluded from downstream profiles.
MIN_PROFILE_RUN_PX = 10


@dataclass(frozen=True)
class FingerMask:
    """Binary finger region plus its per-column boundary rows."""

    inside: np.ndarray
    upper_boundary: np.ndarray
    lower_boundary: np.ndarray

    @property
    def height(self) -> int:
        return self.inside.shape[0]

    @property
    def width(self) -> int:
        return self.inside.shape[1]

    def column_run_lengths(self) -> np.ndarray:
        return self.lower_boundary - self.upper_boundary + 1

    def profile_columns(self, min_run: int = MIN_PROFILE_RUN_PX) -> np.ndarray:
        """Columns wide enough (inside run >= min_run) for profile work."""
        return np.flatnonzero(self.column_run_lengths() >= min_run)


def localize_finger(frame: Frame, edge_half_height: int = DEFAULT_EDGE_HALF_HEIGHT) -> FingerMask:
    """Find per-column finger boundaries with a vertical step detector.

    The upper boundary is the row in the top half with the strongest
    dark-above/bright-below step, the lower boundary the row in the
    bottom half with the strongest bright-above/dark-below step (each
    block edge_half_height tall). Ties in detector response break toward
    the frame's vertical center so flat backgrounds stay deterministic.
    """
    hh = int(edge_half_height)
    height, width = frame.height, frame.width
    if height <= 2 * hh:
        raise DimensionError(
            f"frame height {height} too short for edge_half_height {hh}"
        )
    px = frame.pixels
    # Column-wise prefix sums: csum[r] = sum of rows [0, r).
    csum = np.zeros((height + 1, width), dtype=np.float64)
    np.cumsum(px, axis=0, out=csum[1:])

    center = (height - 1) / 2.0

    # Upper boundary r: block below [r, r+hh) minus block above [r-hh, r).
    rows_up = np.arange(hh, max(hh + 1, height // 2))
    above = csum[rows_up] - csum[rows_up - hh]
    below = csum[rows_up + hh] - csum[rows_up]
    upper = rows_up[_argmax_toward(below - above, rows_up, center)]

    # Lower boundary r: block above (r-hh, r] minus block below (r, r+hh].
    rows_lo = np.arange(height // 2, height - hh)
    above = csum[rows_lo + 1] - csum[rows_lo + 1 - hh]
    below = csum[rows_lo + 1 + hh] - csum[rows_lo + 1]
    lower = rows_lo[_argmax_toward(above - below, rows_lo, center)]

    rows = np.arange(height)[:, None]
    inside = (rows >= upper[None, :]) & (rows <= lower[None, :])
    return FingerMask(inside=inside, upper_boundary=upper, lower_boundary=lower)


def _argmax_toward(resp: np.ndarray, rows: np.ndarray, center: float) -> np.ndarray:
    """Per-column argmax of resp; ties go to the row nearest center."""
    max_resp = resp.max(axis=0)
    dist = np.abs(rows.astype(np.float64) - center)[:, None]
    dist = np.where(resp == max_resp[None, :], dist, np.inf)
    return np.argmin(dist, axis=0)
