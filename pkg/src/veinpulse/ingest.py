"""Load frame sequences from disk into a VideoSequence.

Supported formats are binary PGM (P5, maxval 255) and 8-bit grayscale
PNG. Frames are ordered by lexicographic filename, so sequences must be
written with zero-padded indices (f0000.pgm, f0001.pgm, ...); there is
no timestamp metadata to recover the order from.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .core import Frame, VideoSequence, normalize_frame
from .errors import DimensionError, FormatError, ParameterError, SequenceNotFoundError


@dataclass(frozen=True)
class SequenceManifest:
    """Where a frame sequence lives and how fast it was captured."""

    directory: Path
    pattern: str = "*.pgm"
    fps: float = 30.0

    def __post_init__(self):
        if self.fps <= 0:
            raise ParameterError(f"fps must be positive, got {self.fps}")
        object.__setattr__(self, "directory", Path(self.directory))


_PGM_HEADER = re.compile(rb"^P5\s+(?:#.*\s+)*(\d+)\s+(?:#.*\s+)*(\d+)\s+(?:#.*\s+)*(\d+)\s")


def read_pgm(path: Path | str) -> np.ndarray:
    """Read a binary P5 PGM with maxval 255 into a uint8 array."""
    data = Path(path).read_bytes()
    m = _PGM_HEADER.match(data)
    if not m:
        raise FormatError(f"{path}: not a binary (P5) PGM file")
    width, height, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise FormatError(f"{path}: only maxval 255 supported, got {maxval}")
    body = data[m.end():]
    if len(body) < width * height:
        raise FormatError(f"{path}: truncated pixel data")
    return np.frombuffer(body[: width * height], dtype=np.uint8).reshape(height, width)


def write_pgm(path: Path | str, pixels: np.ndarray) -> None:
    """Write a uint8 grid as a binary P5 PGM with maxval 255."""
    arr = np.ascontiguousarray(pixels, dtype=np.uint8)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError("PGM output must be a nonempty 2-D grid")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode()
    Path(path).write_bytes(header + arr.tobytes())


def read_png(path: Path | str) -> np.ndarray:
    """Read an 8-bit grayscale PNG into a uint8 array."""
    with Image.open(path) as img:
        if img.mode != "L":
            raise FormatError(f"{path}: PNG must be 8-bit grayscale (mode L), got {img.mode}")
        return np.asarray(img, dtype=np.uint8)


def _read_frame_file(path: Path) -> np.ndarray:
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        return read_pgm(path)
    if suffix == ".png":
        return read_png(path)
    raise FormatError(f"{path}: unsupported frame format {suffix!r}")


def load_sequence(manifest: SequenceManifest) -> VideoSequence:
    """Load every matching file, sorted by filename, into a VideoSequence."""
    directory = manifest.directory
    if not directory.is_dir():
        raise SequenceNotFoundError(f"frame directory not found: {directory}")
    paths = sorted(p for p in directory.glob(manifest.pattern) if p.is_file())
    if not paths:
        raise SequenceNotFoundError(
            f"no files matching {manifest.pattern!r} in {directory}"
        )
    frames: list[Frame] = []
    shape: tuple[int, int] | None = None
    for p in paths:
        raw = _read_frame_file(p)
        if shape is None:
            shape = raw.shape
        elif raw.shape != shape:
            raise DimensionError(
                f"{p}: frame is {raw.shape[1]}x{raw.shape[0]}, "
                f"expected {shape[1]}x{shape[0]}"
            )
        frames.append(normalize_frame(raw))
    return VideoSequence(frames=tuple(frames), fps=manifest.fps)
