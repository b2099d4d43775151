"""Frame-sequence grid images with burned-in timestamp markers.

Frames sampled at a fixed rate are tiled row-major into one composite image,
each cell marked at its top-left corner with the frame's timestamp (or its
index). Text is drawn with an embedded 5x7 bitmap font, white on a black
backing box: integer-only math, so output is pixel-identical across runs and
platforms. Inter-frame motion scoring lives here too, feeding the static-video
filter.

Frames are raw RGB8 rasters; PPM (P6) and packed-RGB files are the on-disk
forms. Video decoding is out of scope.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadGeometryError,
    CountMismatchError,
    IoFailureError,
    LabelTooLongError,
    SizeMismatchError,
    TooFewFramesError,
)
from .jsonio import atomic_write_bytes
from .timeline import format_seconds

DEFAULT_FPS = 1.0
DEFAULT_FRAME_SIZE = (320, 180)
MARKER_PADDING = 2  # px from the cell's top-left corner

LABEL_TIMESTAMP = "timestamp"
LABEL_INDEX = "index"

# 5x7 glyphs for marker text. 'X' pixels are lit.
_GLYPHS_RAW = {
    "0": (" XXX ", "X   X", "X  XX", "X X X", "XX  X", "X   X", " XXX "),
    "1": ("  X  ", " XX  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "),
    "2": (" XXX ", "X   X", "    X", "   X ", "  X  ", " X   ", "XXXXX"),
    "3": (" XXX ", "X   X", "    X", "  XX ", "    X", "X   X", " XXX "),
    "4": ("   X ", "  XX ", " X X ", "X  X ", "XXXXX", "   X ", "   X "),
    "5": ("XXXXX", "X    ", "XXXX ", "    X", "    X", "X   X", " XXX "),
    "6": (" XXX ", "X    ", "X    ", "XXXX ", "X   X", "X   X", " XXX "),
    "7": ("XXXXX", "    X", "   X ", "  X  ", " X   ", " X   ", " X   "),
    "8": (" XXX ", "X   X", "X   X", " XXX ", "X   X", "X   X", " XXX "),
    "9": (" XXX ", "X   X", "X   X", " XXXX", "    X", "    X", " XXX "),
    ".": ("     ", "     ", "     ", "     ", "     ", " XX  ", " XX  "),
    ":": ("     ", " XX  ", " XX  ", "     ", " XX  ", " XX  ", "     "),
    "-": ("     ", "     ", "     ", "XXXXX", "     ", "     ", "     "),
    "s": ("     ", "     ", " XXX ", "X    ", " XXX ", "    X", "XXXX "),
    " ": ("     ", "     ", "     ", "     ", "     ", "     ", "     "),
}
GLYPH_W, GLYPH_H = 5, 7
GLYPH_ADVANCE = 6  # 5 px glyph + 1 px spacing

FONT_5X7 = {
    ch: np.array([[1 if c == "X" else 0 for c in row] for row in rows], dtype=np.uint8)
    for ch, rows in _GLYPHS_RAW.items()
}


class RasterFrame:
    """A width x height RGB8 raster (row-major)."""

    __slots__ = ("width", "height", "pixels")

    def __init__(self, width: int, height: int, pixels: np.ndarray):
        if pixels.shape != (height, width, 3) or pixels.dtype != np.uint8:
            raise SizeMismatchError(
                f"pixel buffer must be uint8 of shape ({height}, {width}, 3), got "
                f"{pixels.dtype} {pixels.shape}"
            )
        self.width = width
        self.height = height
        self.pixels = pixels

    @classmethod
    def filled(cls, width: int, height: int, rgb: tuple[int, int, int]) -> "RasterFrame":
        buf = np.empty((height, width, 3), dtype=np.uint8)
        buf[:, :] = rgb
        return cls(width, height, buf)

    @classmethod
    def from_bytes(cls, width: int, height: int, data: bytes) -> "RasterFrame":
        expected = width * height * 3
        if len(data) != expected:
            raise SizeMismatchError(f"need {expected} bytes for {width}x{height} RGB, got {len(data)}")
        buf = np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3).copy()
        return cls(width, height, buf)

    def to_bytes(self) -> bytes:
        return self.pixels.tobytes()

    def copy(self) -> "RasterFrame":
        return RasterFrame(self.width, self.height, self.pixels.copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RasterFrame)
            and self.width == other.width
            and self.height == other.height
            and bool(np.array_equal(self.pixels, other.pixels))
        )


@dataclass(frozen=True)
class GridCell:
    frame_index: int
    timestamp_label: str
    origin_x: int
    origin_y: int
    marker_x: int
    marker_y: int


@dataclass(frozen=True)
class FramePlan:
    fps: float
    frame_w: int
    frame_h: int
    cols: int
    rows: int
    cells: tuple[GridCell, ...]

    @property
    def frame_count(self) -> int:
        return len(self.cells)

    @property
    def composite_size(self) -> tuple[int, int]:
        return (self.cols * self.frame_w, self.rows * self.frame_h)


def plan_grid(
    duration: float,
    fps: float = DEFAULT_FPS,
    cols: int = 4,
    frame_size: tuple[int, int] = DEFAULT_FRAME_SIZE,
    label_mode: str = LABEL_TIMESTAMP,
) -> FramePlan:
    """Lay out floor(duration * fps) frames (at least one) row-major.

    At 1 fps timestamp labels are whole seconds ("0", "1", ...); at other
    rates they render at centisecond precision. label_mode="index" labels
    cells with the frame index instead.
    """
    if duration <= 0 or not math.isfinite(duration):
        raise BadGeometryError(f"duration must be positive, got {duration}")
    if fps <= 0 or not math.isfinite(fps):
        raise BadGeometryError(f"fps must be positive, got {fps}")
    if cols < 1:
        raise BadGeometryError(f"cols must be >= 1, got {cols}")
    frame_w, frame_h = frame_size
    if frame_w < 1 or frame_h < 1:
        raise BadGeometryError(f"frame size must be positive, got {frame_size}")

    count = max(1, int(duration * fps))
    rows = (count + cols - 1) // cols
    cells = []
    for k in range(count):
        r, c = divmod(k, cols)
        if label_mode == LABEL_INDEX:
            label = str(k)
        else:
            t = k / fps
            label = str(int(t)) if fps == 1.0 else format_seconds(t)
        cells.append(
            GridCell(
                frame_index=k,
                timestamp_label=label,
                origin_x=c * frame_w,
                origin_y=r * frame_h,
                marker_x=c * frame_w + MARKER_PADDING,
                marker_y=r * frame_h + MARKER_PADDING,
            )
        )
    return FramePlan(fps=fps, frame_w=frame_w, frame_h=frame_h, cols=cols, rows=rows, cells=tuple(cells))


def label_box_size(label: str) -> tuple[int, int]:
    """Backing-box pixels for a label: glyph block plus a 1 px border."""
    return (GLYPH_ADVANCE * len(label) + 1, GLYPH_H + 2)


def burn_timestamp(
    frame: RasterFrame, label: str, position: tuple[int, int] = (MARKER_PADDING, MARKER_PADDING)
) -> RasterFrame:
    """Return a copy with the label burned in: white 5x7 glyphs on black.

    Only the backing-box rectangle changes; burning the same label twice is
    a no-op on the second pass. Raises LabelTooLongError when the box does
    not fit inside the frame at the given position.
    """
    for ch in label:
        if ch not in FONT_5X7:
            raise LabelTooLongError(f"no glyph for character {ch!r}")
    x, y = position
    box_w, box_h = label_box_size(label)
    if x < 0 or y < 0 or x + box_w > frame.width or y + box_h > frame.height:
        raise LabelTooLongError(
            f"label {label!r} box {box_w}x{box_h} at ({x},{y}) exceeds "
            f"{frame.width}x{frame.height} frame"
        )
    out = frame.copy()
    out.pixels[y : y + box_h, x : x + box_w] = 0
    for i, ch in enumerate(label):
        gx = x + 1 + i * GLYPH_ADVANCE
        block = out.pixels[y + 1 : y + 1 + GLYPH_H, gx : gx + GLYPH_W]
        block[FONT_5X7[ch] == 1] = 255
    return out


def compose_grid(frames: list[RasterFrame], plan: FramePlan) -> RasterFrame:
    """Tile frames per the plan, burning each cell's marker label."""
    if len(frames) != plan.frame_count:
        raise CountMismatchError(f"plan has {plan.frame_count} cells, got {len(frames)} frames")
    for i, frame in enumerate(frames):
        if (frame.width, frame.height) != (plan.frame_w, plan.frame_h):
            raise SizeMismatchError(
                f"frame {i} is {frame.width}x{frame.height}, plan wants "
                f"{plan.frame_w}x{plan.frame_h}"
            )
    comp_w, comp_h = plan.composite_size
    canvas = np.zeros((comp_h, comp_w, 3), dtype=np.uint8)
    for cell, frame in zip(plan.cells, frames):
        marked = burn_timestamp(frame, cell.timestamp_label)
        canvas[
            cell.origin_y : cell.origin_y + plan.frame_h,
            cell.origin_x : cell.origin_x + plan.frame_w,
        ] = marked.pixels
    return RasterFrame(comp_w, comp_h, canvas)


def motion_score(frames: list[RasterFrame]) -> float:
    """Mean absolute inter-frame difference, normalized to [0, 1].

    Mean over consecutive pairs of the mean |channel delta| / 255. Symmetric
    in frame order. Needs >= 2 frames of identical size.
    """
    if len(frames) < 2:
        raise TooFewFramesError(f"motion needs >= 2 frames, got {len(frames)}")
    size = (frames[0].width, frames[0].height)
    for i, frame in enumerate(frames):
        if (frame.width, frame.height) != size:
            raise SizeMismatchError(f"frame {i} size differs from frame 0")
    diffs = []
    for a, b in zip(frames, frames[1:]):
        delta = np.abs(a.pixels.astype(np.int16) - b.pixels.astype(np.int16))
        diffs.append(float(delta.mean()))
    return float(np.mean(diffs) / 255.0)


# --- on-disk frame formats ------------------------------------------------------

_PPM_HEADER_RE = re.compile(rb"^P6\s+(?:#[^\n]*\n\s*)*(\d+)\s+(\d+)\s+(\d+)\s")


def write_ppm(path: str | Path, frame: RasterFrame) -> None:
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + frame.to_bytes())


def read_ppm(path: str | Path) -> RasterFrame:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc
    match = _PPM_HEADER_RE.match(data)
    if not match:
        raise IoFailureError(f"{path} is not a binary P6 PPM")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval != 255:
        raise IoFailureError(f"{path}: only maxval 255 is supported")
    return RasterFrame.from_bytes(width, height, data[match.end() : match.end() + width * height * 3])


def read_raw_rgb(path: str | Path, width: int, height: int) -> RasterFrame:
    """Packed RGB8 with dimensions supplied out-of-band (sidecar/manifest)."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc
    return RasterFrame.from_bytes(width, height, data)
