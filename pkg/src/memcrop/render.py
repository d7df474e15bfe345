"""Apply a crop trajectory to a frame sequence.

Trajectories are defined on sampled frame indices; intermediate frames get
their window by linear interpolation of center and size, rounded half-up and
clamped in-frame, so the crop glides smoothly instead of jumping at each
sample. Rendering is pure and per-frame independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError
from .frames import CropRect, CropTrajectory, Frame, FrameSequence, clamp_rect

INTERPOLATION_MODES = ("nearest", "bilinear")


@dataclass(frozen=True)
class RenderConfig:
    """Output handling: resize crops back to source dims (default) or keep
    the crop's own size; bilinear or nearest resampling."""

    resize_to_source: bool = True
    interpolation: str = "bilinear"

    def __post_init__(self):
        if self.interpolation not in INTERPOLATION_MODES:
            raise InvalidArgumentError(
                f"unknown interpolation {self.interpolation!r}, "
                f"expected one of {INTERPOLATION_MODES}"
            )


def crop_frame(frame: Frame, rect: CropRect) -> Frame:
    """Cut the window out of the frame, bit-exact."""
    rect.validate_within(frame.width, frame.height)
    return Frame(frame.pixels[rect.y : rect.y + rect.h, rect.x : rect.x + rect.w].copy())


def _source_positions(out_size: int, in_size: int) -> np.ndarray:
    # Pixel-center alignment: output center u+0.5 maps to input coordinate
    # (u+0.5)*in/out, i.e. index space position (u+0.5)*in/out - 0.5.
    return (np.arange(out_size, dtype=np.float64) + 0.5) * (in_size / out_size) - 0.5


def resize_frame(frame: Frame, out_w: int, out_h: int, interpolation: str = "bilinear") -> Frame:
    """Resample a frame to new dimensions.

    Nearest rounds source coordinates half-up; bilinear samples with edge
    clamping. Resizing to the same dimensions returns the frame unchanged.
    """
    if interpolation not in INTERPOLATION_MODES:
        raise InvalidArgumentError(f"unknown interpolation {interpolation!r}")
    if out_w < 1 or out_h < 1:
        raise InvalidArgumentError(f"output dimensions must be >= 1, got {out_w}x{out_h}")
    if out_w == frame.width and out_h == frame.height:
        return frame
    src = frame.pixels
    xs = _source_positions(out_w, frame.width)
    ys = _source_positions(out_h, frame.height)
    if interpolation == "nearest":
        # round_half_up(pos) == floor(pos + 0.5) == floor((u+0.5)*in/out)
        xi = np.clip(np.floor(xs + 0.5).astype(np.int64), 0, frame.width - 1)
        yi = np.clip(np.floor(ys + 0.5).astype(np.int64), 0, frame.height - 1)
        return Frame(src[np.ix_(yi, xi)])
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = (xs - x0).astype(np.float32)[np.newaxis, :, np.newaxis]
    fy = (ys - y0).astype(np.float32)[:, np.newaxis, np.newaxis]
    x0c = np.clip(x0, 0, frame.width - 1)
    x1c = np.clip(x0 + 1, 0, frame.width - 1)
    y0c = np.clip(y0, 0, frame.height - 1)
    y1c = np.clip(y0 + 1, 0, frame.height - 1)
    # separable lerp a + t*(b - a): rows at source width first, then columns
    rows = src[y0c].astype(np.float32)
    high = src[y1c].astype(np.float32)
    high -= rows
    high *= fy
    rows += high
    blended = np.take(rows, x0c, axis=1)
    edge = np.take(rows, x1c, axis=1)
    edge -= blended
    edge *= fx
    blended += edge
    # floor(v + 0.5) for v in [0, 255]: plain truncation after the shift
    blended += 0.5
    return Frame(blended.astype(np.uint8))


def _rect_for_index(traj: CropTrajectory, index: int) -> CropRect:
    """Window for an arbitrary frame index, interpolating between samples."""
    indices = traj.frame_indices()
    rects = [r for _, r in traj.rects]
    if index <= indices[0]:
        return rects[0]
    if index >= indices[-1]:
        return rects[-1]
    pos = 0
    while indices[pos + 1] < index:
        pos += 1
    i0, i1 = indices[pos], indices[pos + 1]
    r0, r1 = rects[pos], rects[pos + 1]
    if index == i1:
        return r1
    t = (index - i0) / (i1 - i0)
    cx0, cy0 = r0.center()
    cx1, cy1 = r1.center()
    cx = cx0 + (cx1 - cx0) * t
    cy = cy0 + (cy1 - cy0) * t
    w = r0.w + (r1.w - r0.w) * t
    h = r0.h + (r1.h - r0.h) * t
    return clamp_rect(cx, cy, w, h, traj.src_width, traj.src_height)


def render_video(seq: FrameSequence, traj: CropTrajectory, cfg: RenderConfig) -> FrameSequence:
    """Crop every frame of the sequence along the trajectory.

    Output has exactly one frame per input frame; with ``resize_to_source``
    each crop is resampled back to the source dimensions.
    """
    if traj.video_id and traj.video_id != seq.video_id:
        raise InvalidArgumentError(
            f"trajectory is for video {traj.video_id!r}, sequence is {seq.video_id!r}"
        )
    if traj.src_width != seq.width or traj.src_height != seq.height:
        raise DimensionMismatchError(
            f"trajectory expects {traj.src_width}x{traj.src_height} frames, "
            f"sequence is {seq.width}x{seq.height}"
        )
    out = []
    for index, frame in enumerate(seq):
        rect = _rect_for_index(traj, index)
        cropped = crop_frame(frame, rect)
        if cfg.resize_to_source:
            cropped = resize_frame(cropped, seq.width, seq.height, cfg.interpolation)
        out.append(cropped)
    return FrameSequence(seq.video_id, out)
