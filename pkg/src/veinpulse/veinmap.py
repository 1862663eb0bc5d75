"""Per-frame vein-likelihood fields and their binarization.

Two extraction routes. The curvature method scores concave valleys of
smoothed cross-sectional intensity profiles in four directions and then
reinforces aligned centers so broken centerlines reconnect; it is
deterministic. The line-tracking method launches many seeded random
walks that only advance along cross-sectional valleys and accumulates
visit counts in a locus field; it trades determinism (recovered via the
seed) for contrast.

Vessels are darker than tissue, so a vessel cross-section is an
intensity valley: curvature kappa = P''/(1+P'^2)^(3/2) > 0 at its floor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .core import Frame
from .errors import EmptyMapError, ParameterError
from .roi import FingerMask

MAX_CURVATURE = "max_curvature"
REPEATED_LINE_TRACKING = "repeated_line_tracking"

# Line tracking: a step is a valley only if both flanks sit at least
# this much above the center (on [0, 1] intensities); rejects walks
# across flat sensor noise.
RLT_VALLEY_DEPTH = 0.01

# Turn policy: candidates are +-45 deg of the heading, weighted to
# favor going straight; vessels are locally straight.
RLT_STRAIGHT_WEIGHT = 2.0
RLT_TURN_WEIGHT = 1.0

# Eight step directions: E, NE, N, NW, W, SW, S, SE as (dy, dx).
_STEPS = np.array(
    [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)],
    dtype=np.int64,
)


@dataclass(frozen=True)
class ScoreField:
    """Real-valued per-pixel vein likelihood; zero outside the finger."""

    scores: np.ndarray
    method: str

    @property
    def height(self) -> int:
        return self.scores.shape[0]

    @property
    def width(self) -> int:
        return self.scores.shape[1]

    def to_u8(self) -> np.ndarray:
        """Min-max scale scores onto 0..255 for PGM export."""
        lo, hi = float(self.scores.min()), float(self.scores.max())
        if hi <= lo:
            return np.zeros(self.scores.shape, dtype=np.uint8)
        return np.rint((self.scores - lo) / (hi - lo) * 255).astype(np.uint8)


@dataclass(frozen=True)
class VeinMap:
    """Binary vasculature mask."""

    vein: np.ndarray

    @property
    def height(self) -> int:
        return self.vein.shape[0]

    @property
    def width(self) -> int:
        return self.vein.shape[1]

    def to_u8(self) -> np.ndarray:
        return self.vein.astype(np.uint8) * 255


# ---------------------------------------------------------------------------
# Maximum curvature


@lru_cache(maxsize=32)
def _profile_lines(height: int, width: int, direction: str):
    """Gather maps (ys, xs, valid) covering the grid with parallel lines.

    Each row of the returned (n_lines, max_len) arrays is one profile;
    padding replicates the last valid pixel so smoothing stays flat there.
    """
    if direction == "vertical":
        ys = np.broadcast_to(np.arange(height)[None, :], (width, height)).copy()
        xs = np.broadcast_to(np.arange(width)[:, None], (width, height)).copy()
        valid = np.ones((width, height), dtype=bool)
    elif direction == "horizontal":
        ys = np.broadcast_to(np.arange(height)[:, None], (height, width)).copy()
        xs = np.broadcast_to(np.arange(width)[None, :], (height, width)).copy()
        valid = np.ones((height, width), dtype=bool)
    elif direction in ("diag_down", "diag_up"):
        # diag_down runs (y, x) -> (y+1, x+1); diag_up runs (y, x) -> (y+1, x-1).
        max_len = min(height, width)
        offsets = np.arange(-(height - 1), width)
        n = offsets.size
        j = np.arange(max_len)[None, :]
        y0 = np.maximum(0, -offsets)[:, None]
        x0 = np.maximum(0, offsets)[:, None]
        ys = y0 + j
        xs = x0 + j
        valid = (ys < height) & (xs < width)
        last = np.maximum(valid.sum(axis=1) - 1, 0)
        ys = np.minimum(ys, (y0[:, 0] + last)[:, None])
        xs = np.minimum(xs, (x0[:, 0] + last)[:, None])
        if direction == "diag_up":
            xs = width - 1 - xs
    else:
        raise ValueError(f"unknown profile direction {direction!r}")
    for a in (ys, xs, valid):
        a.setflags(write=False)
    return ys, xs, valid


def _run_lengths(pos: np.ndarray) -> np.ndarray:
    """Per-position length of the surrounding True run, row-wise."""
    n, length = pos.shape
    idx = np.arange(length)
    last_false = np.where(~pos, idx, -1)
    np.maximum.accumulate(last_false, axis=1, out=last_false)
    fwd = idx - last_false
    rev = pos[:, ::-1]
    next_false = np.where(~rev, idx, -1)
    np.maximum.accumulate(next_false, axis=1, out=next_false)
    bwd = (idx - next_false)[:, ::-1]
    runs = fwd + bwd - 1
    runs[~pos] = 0
    return runs


def _shift2(a: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Translate a grid, filling vacated cells with zero."""
    out = np.zeros_like(a)
    h, w = a.shape
    ys = slice(max(dy, 0), h + min(dy, 0))
    xs = slice(max(dx, 0), w + min(dx, 0))
    ys_src = slice(max(-dy, 0), h + min(-dy, 0))
    xs_src = slice(max(-dx, 0), w + min(-dx, 0))
    out[ys, xs] = a[ys_src, xs_src]
    return out


def max_curvature(frame: Frame, mask: FingerMask, sigma: float,
                  vertical_only: bool = False) -> ScoreField:
    """Score concave valley centers of smoothed profiles, then connect.

    For each profile direction the cross-section is Gaussian-smoothed at
    scale sigma and its curvature computed by central differences. Every
    pixel of a positive-curvature run is scored by its own kappa times
    the run width, so a run's score peaks exactly at the valley floor
    while its above-threshold slice widens with the vessel; that is what
    lets the binarized map's thickness follow the pulse. Each direction's
    field is then reinforced with a min/max filter along the vessel axis
    (perpendicular to its profiles): a pixel keeps min(best of two
    neighbors ahead, best of two behind), so aligned valley runs connect
    across small breaks while runs without cross-profile support - noise
    - vanish. The output is the pixelwise max over directions.
    """
    if sigma < 1:
        raise ParameterError(f"curvature sigma must be >= 1, got {sigma}")
    px = frame.pixels
    height, width = px.shape
    inside = mask.inside

    # Profile direction -> the axis its detected vessels run along.
    vessel_axis = {
        "vertical": (0, 1),
        "horizontal": (1, 0),
        "diag_down": (1, -1),
        "diag_up": (1, 1),
    }
    directions = ("vertical",) if vertical_only else tuple(vessel_axis)

    connected = np.zeros((height, width), dtype=np.float64)
    for direction in directions:
        ys, xs, valid = _profile_lines(height, width, direction)
        profs = px[ys, xs]
        smooth = gaussian_filter1d(profs, sigma, axis=1, mode="nearest")
        p1 = np.gradient(smooth, axis=1)
        p2 = np.gradient(p1, axis=1)
        kappa = p2 / np.power(1.0 + p1 * p1, 1.5)

        pos = (kappa > 0) & valid & inside[ys, xs]
        runs = _run_lengths(pos)
        field = np.zeros((height, width), dtype=np.float64)
        np.add.at(field, (ys[pos], xs[pos]), kappa[pos] * runs[pos])

        dy, dx = vessel_axis[direction]
        fwd = np.maximum(_shift2(field, dy, dx), _shift2(field, 2 * dy, 2 * dx))
        back = np.maximum(_shift2(field, -dy, -dx), _shift2(field, -2 * dy, -2 * dx))
        np.maximum(connected, np.minimum(fwd, back), out=connected)

    connected[~inside] = 0.0
    return ScoreField(scores=connected, method=MAX_CURVATURE)


# ---------------------------------------------------------------------------
# Repeated line tracking


def _valley_step_maps(px: np.ndarray, mask: np.ndarray, valley_radius: float) -> np.ndarray:
    """(8, H, W) lookup: may a walk step onto pixel q moving in direction d?

    True where q is inside the mask and the cross-section perpendicular
    to d, sampled valley_radius away on each side, is a valley deeper
    than RLT_VALLEY_DEPTH. Flanks outside the image fail the test.
    """
    height, width = px.shape
    ok = np.zeros((8, height, width), dtype=bool)
    r_axis = max(1, int(round(valley_radius)))
    r_diag = max(1, int(round(valley_radius / np.sqrt(2.0))))
    for d in range(8):
        dy, dx = _STEPS[d]
        # Perpendicular offset; diagonal steps get diagonal cross-sections.
        if dy == 0 or dx == 0:
            py, pxo = (r_axis, 0) if dy == 0 else (0, r_axis)
        else:
            py, pxo = (r_diag * dy, -r_diag * dx)
        flank_a = _shifted_values(px, py, pxo, fill=-np.inf)
        flank_b = _shifted_values(px, -py, -pxo, fill=-np.inf)
        deep = np.minimum(flank_a, flank_b) - px
        ok[d] = mask & (deep > RLT_VALLEY_DEPTH)
    return ok


def _shifted_values(a: np.ndarray, dy: int, dx: int, fill: float) -> np.ndarray:
    """Value of a at (y+dy, x+dx), or fill where that falls outside."""
    out = np.full(a.shape, fill, dtype=np.float64)
    h, w = a.shape
    ys = slice(max(-dy, 0), h + min(-dy, 0))
    xs = slice(max(-dx, 0), w + min(-dx, 0))
    ys_src = slice(max(dy, 0), h + min(dy, 0))
    xs_src = slice(max(dx, 0), w + min(dx, 0))
    out[ys, xs] = a[ys_src, xs_src]
    return out


def repeated_line_tracking(frame: Frame, mask: FingerMask, iterations: int,
                           valley_radius: float, seed: int = 0) -> ScoreField:
    """Accumulate valley-following random walks into a locus field.

    Each iteration starts a walk at a uniformly random mask pixel with a
    random heading. A step is taken onto a neighbor within +-45 deg of
    the heading only if the cross-section there is a valley; the walk
    ends when no candidate qualifies or it would leave the mask. Every
    pixel a walk touches (including its start, once it moves at all)
    increments the locus count. Walks advance in lockstep so the whole
    batch is a handful of array operations per step.
    """
    if iterations < 0:
        raise ParameterError(f"iterations must be >= 0, got {iterations}")
    px = frame.pixels
    height, width = px.shape
    locus = np.zeros((height, width), dtype=np.int64)
    inside_idx = np.flatnonzero(mask.inside.ravel())
    if iterations == 0 or inside_idx.size == 0:
        return ScoreField(scores=locus.astype(np.float64), method=REPEATED_LINE_TRACKING)

    step_ok = _valley_step_maps(px, mask.inside, valley_radius)
    rng = np.random.Generator(np.random.PCG64(seed))

    flat_start = inside_idx[rng.integers(0, inside_idx.size, size=iterations)]
    ys = (flat_start // width).astype(np.int64)
    xs = (flat_start % width).astype(np.int64)
    heading = rng.integers(0, 8, size=iterations).astype(np.int64)
    start_ys, start_xs = ys.copy(), xs.copy()
    moved_once = np.zeros(iterations, dtype=bool)

    max_steps = 2 * max(height, width)  # guards against loops in dark blobs
    cand_offsets = np.array([-1, 0, 1])
    turn_weights = np.array([RLT_TURN_WEIGHT, RLT_STRAIGHT_WEIGHT, RLT_TURN_WEIGHT])

    for _ in range(max_steps):
        n = ys.size
        if n == 0:
            break
        dirs = (heading[None, :] + cand_offsets[:, None]) % 8
        ny = ys[None, :] + _STEPS[dirs, 0]
        nx = xs[None, :] + _STEPS[dirs, 1]
        inb = (ny >= 0) & (ny < height) & (nx >= 0) & (nx < width)
        ok = np.zeros((3, n), dtype=bool)
        ok[inb] = step_ok[dirs[inb], ny[inb], nx[inb]]

        weights = np.where(ok, turn_weights[:, None], 0.0)
        total = weights.sum(axis=0)
        alive = total > 0.0

        draw = rng.random(n) * total
        c0 = weights[0]
        c1 = c0 + weights[1]
        choice = (draw >= c0).astype(np.int64) + (draw >= c1)

        take = alive
        sel = (choice[take], np.flatnonzero(take))
        ys_new = ny[sel]
        xs_new = nx[sel]
        heading_new = dirs[sel]

        first_move = take & ~moved_once
        np.add.at(locus, (start_ys[first_move], start_xs[first_move]), 1)
        moved_once |= take
        np.add.at(locus, (ys_new, xs_new), 1)

        ys, xs, heading = ys_new, xs_new, heading_new
        start_ys, start_xs = start_ys[take], start_xs[take]
        moved_once = moved_once[take]

    return ScoreField(scores=locus.astype(np.float64), method=REPEATED_LINE_TRACKING)


# ---------------------------------------------------------------------------
# Binarization


def binarize(field: ScoreField, percentile: float) -> VeinMap:
    """Keep pixels at or above the given percentile of nonzero scores."""
    if not 0 <= percentile < 100:
        raise ParameterError(f"percentile must lie in [0, 100), got {percentile}")
    nonzero = field.scores[field.scores > 0]
    if nonzero.size == 0:
        raise EmptyMapError("cannot binarize an all-zero score field")
    threshold = np.percentile(nonzero, percentile)
    return VeinMap(vein=field.scores >= threshold)
