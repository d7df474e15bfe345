"""Core raster and geometry types: frames, crop rectangles, trajectories.

Coordinate convention used throughout the package: x grows rightward
(columns), y grows downward (rows), origin at the top-left pixel. Real-valued
centers and sizes are rounded half-up before clamping so results are
deterministic and locale-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError


def round_half_up(value: float) -> int:
    """Round to the nearest integer, ties away from the floor (0.5 -> 1)."""
    return int(math.floor(value + 0.5))


class Frame:
    """One video frame: 8-bit RGB samples in a (height, width, 3) array.

    The pixel array is made read-only at construction; frames are treated as
    immutable values and may be shared freely between workers.
    """

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise InvalidArgumentError(
                f"frame pixels must have shape (height, width, 3), got {arr.shape}"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidArgumentError("frame must be at least 1x1")
        if arr.dtype != np.uint8:
            raise InvalidArgumentError(f"frame pixels must be uint8, got {arr.dtype}")
        arr = np.ascontiguousarray(arr)
        view = arr.view()
        view.flags.writeable = False
        self.pixels = view

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self) -> str:
        return f"Frame({self.width}x{self.height})"


class FrameSequence:
    """An ordered, equally-sized list of frames belonging to one video."""

    __slots__ = ("video_id", "frames")

    def __init__(self, video_id: str, frames):
        frames = tuple(frames)
        if not frames:
            raise InvalidArgumentError("a frame sequence needs at least one frame")
        w, h = frames[0].width, frames[0].height
        for i, frame in enumerate(frames):
            if frame.width != w or frame.height != h:
                raise DimensionMismatchError(
                    f"frame {i} is {frame.width}x{frame.height}, expected {w}x{h}"
                )
        self.video_id = video_id
        self.frames = frames

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, index: int) -> Frame:
        return self.frames[index]


@dataclass(frozen=True)
class CropRect:
    """Axis-aligned crop window in integer pixel coordinates."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)):
                raise InvalidArgumentError(f"rect field {name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.w < 1 or self.h < 1:
            raise InvalidArgumentError(f"rect size must be at least 1x1, got {self.w}x{self.h}")

    def validate_within(self, frame_w: int, frame_h: int) -> None:
        """Raise unless the rect lies fully inside a frame of the given size."""
        if self.x < 0 or self.y < 0 or self.x + self.w > frame_w or self.y + self.h > frame_h:
            raise InvalidArgumentError(
                f"rect {self} does not fit inside a {frame_w}x{frame_h} frame"
            )

    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)


@dataclass(frozen=True)
class CropTrajectory:
    """Per-frame crop windows for one video, defined on sampled frame indices.

    ``strategy`` and ``fallback`` record which planning branch produced the
    trajectory (``fallback`` is set when a variable-size plan degraded to the
    fixed-size one).
    """

    video_id: str
    src_width: int
    src_height: int
    rects: tuple[tuple[int, CropRect], ...]
    strategy: str = ""
    fallback: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple((int(i), r) for i, r in self.rects))
        if not self.rects:
            raise InvalidArgumentError("trajectory needs at least one rect")
        if self.src_width < 1 or self.src_height < 1:
            raise InvalidArgumentError("trajectory source dimensions must be positive")
        prev = None
        for idx, rect in self.rects:
            if prev is not None and idx <= prev:
                raise InvalidArgumentError(
                    f"trajectory frame indices must be strictly increasing, got {idx} after {prev}"
                )
            prev = idx
            rect.validate_within(self.src_width, self.src_height)

    def frame_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.rects)


def sample_frame_indices(frame_count: int, stride: int, offset: int = 0) -> list[int]:
    """Indices of the frames analyzed per video: offset, offset+stride, ...

    The default offset of 0 yields 9 samples for a 90-frame video at stride
    10, the sampling rate the scoring pipeline assumes.
    """
    if frame_count < 1:
        raise InvalidArgumentError(f"frame_count must be >= 1, got {frame_count}")
    if stride < 1:
        raise InvalidArgumentError(f"stride must be >= 1, got {stride}")
    if offset < 0 or offset >= frame_count:
        raise InvalidArgumentError(
            f"offset must be in [0, frame_count), got {offset} for {frame_count} frames"
        )
    return list(range(offset, frame_count, stride))


def clamp_rect(
    center_x: float,
    center_y: float,
    w: float,
    h: float,
    frame_w: int,
    frame_h: int,
) -> CropRect:
    """Place a (possibly real-valued) crop window fully inside a frame.

    Size is rounded half-up and preserved; the center is moved the minimum
    distance needed to keep the window in-frame. Clamping an already-valid
    rect returns it unchanged.
    """
    wi = round_half_up(w)
    hi = round_half_up(h)
    if wi > frame_w or hi > frame_h:
        raise InvalidArgumentError(
            f"requested crop {wi}x{hi} exceeds frame {frame_w}x{frame_h}"
        )
    if wi < 1 or hi < 1:
        raise InvalidArgumentError(f"requested crop {wi}x{hi} is degenerate")
    x = round_half_up(center_x - wi / 2.0)
    y = round_half_up(center_y - hi / 2.0)
    x = min(max(x, 0), frame_w - wi)
    y = min(max(y, 0), frame_h - hi)
    return CropRect(x, y, wi, hi)
