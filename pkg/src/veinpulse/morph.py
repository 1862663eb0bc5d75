"""Morphological enhancement and noise removal for binary vein maps.

Two fixed post-processing chains mirror the two extraction routes:
curvature maps are dilated then median-filtered; line-tracking maps are
median-filtered then eroded and dilated (optionally median last).
Kernels stay below vessel scale: vessels run 3-9 px wide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import PipelineConfig
from .errors import ParameterError
from .veinmap import VeinMap


@dataclass(frozen=True)
class StructuringElement:
    shape: str = "square"  # "disk" or "square"
    radius: int = 1

    def __post_init__(self):
        if self.radius < 1:
            raise ParameterError(f"radius must be >= 1, got {self.radius}")
        if self.shape not in ("disk", "square"):
            raise ParameterError(f"shape must be 'disk' or 'square', got {self.shape!r}")

    def footprint(self) -> np.ndarray:
        r = self.radius
        if self.shape == "square":
            return np.ones((2 * r + 1, 2 * r + 1), dtype=bool)
        yy, xx = np.mgrid[-r: r + 1, -r: r + 1]
        return yy * yy + xx * xx <= r * r


def dilate(vein_map: VeinMap, se: StructuringElement) -> VeinMap:
    """Set a pixel iff the element centred there overlaps foreground."""
    out = ndimage.binary_dilation(vein_map.vein, structure=se.footprint(), border_value=0)
    return VeinMap(vein=out)


def erode(vein_map: VeinMap, se: StructuringElement) -> VeinMap:
    """Set a pixel iff the element centred there fits inside foreground."""
    out = ndimage.binary_erosion(vein_map.vein, structure=se.footprint(), border_value=0)
    return VeinMap(vein=out)


def open_map(vein_map: VeinMap, se: StructuringElement) -> VeinMap:
    """Erosion followed by dilation; removes features below element scale."""
    return dilate(erode(vein_map, se), se)


def median_filter(vein_map: VeinMap, window: int) -> VeinMap:
    """Majority vote in a window x window neighborhood, edges replicated."""
    if window % 2 == 0 or window < 3:
        raise ParameterError(f"median window must be odd and >= 3, got {window}")
    out = ndimage.median_filter(vein_map.vein.astype(np.uint8), size=window, mode="nearest")
    return VeinMap(vein=out.astype(bool))


def postprocess_max_curvature(vein_map: VeinMap, config: PipelineConfig) -> VeinMap:
    """Curvature-route chain: dilate to extend broken vessels, then median."""
    se = StructuringElement(shape="square", radius=config.morph_radius)
    return median_filter(dilate(vein_map, se), config.median_window)


def postprocess_line_tracking(vein_map: VeinMap, config: PipelineConfig) -> VeinMap:
    """Tracking-route chain: median to kill speckle, then erode and dilate.

    rlt_median_last swaps the median to the end of the chain.
    """
    se = StructuringElement(shape="square", radius=config.morph_radius)
    if config.rlt_median_last:
        return median_filter(dilate(erode(vein_map, se), se), config.median_window)
    cleaned = median_filter(vein_map, config.median_window)
    return dilate(erode(cleaned, se), se)
