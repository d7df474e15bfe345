"""Crop trajectory planning.

Three strategies turn per-frame saliency analysis into crop windows:

* ``center`` - a fixed, centered window at a per-axis fraction of the source
  size, identical across frames.
* ``fixed_track`` - one window size for the whole video (the largest padded
  salient bounding box, aspect-corrected), centered per frame on the saliency
  centroid.
* ``variable_track`` - window size varies linearly across the video. The
  square roots of the per-frame salient areas are fit to a line by ordinary
  least squares; only videos whose fit is tight enough and clearly increasing
  or decreasing get the linear zoom, the rest fall back to fixed tracking.

Crops always keep the source aspect ratio so rendered output can be resized
back to source dimensions without distortion. Positions are clamped at frame
borders (size is preserved, the window stops sliding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError
from .frames import CropRect, CropTrajectory, clamp_rect, round_half_up
from .saliency import Centroid, RegionStats, VideoSaliencyAnalysis

PLAN_STRATEGIES = ("center", "fixed_track", "variable_track")

ZOOM_DIRECTIONS = ("increasing", "decreasing", "neither")

#: Smallest crop side emitted by the tracking strategies, to keep aggressive
#: zoom fits from collapsing the window to a sliver.
MIN_CROP_SIDE = 8

#: Relative defaults for zoom-fit selection, as multiples of mean(sqrt(area)):
#: resolution-independent, so the same config works at any frame size.
DEFAULT_RMSE_FRACTION = 0.15
DEFAULT_SLOPE_FRACTION = 0.01


@dataclass(frozen=True)
class ZoomFit:
    """Least-squares line through sqrt(area) per sample position."""

    slope: float
    intercept: float
    rmse: float
    direction: str

    def __post_init__(self):
        if self.direction not in ZOOM_DIRECTIONS:
            raise InvalidArgumentError(f"unknown zoom direction {self.direction!r}")
        if self.rmse < 0:
            raise InvalidArgumentError("rmse must be >= 0")


@dataclass(frozen=True)
class PlanConfig:
    """Planner knobs; ``zoom_rmse_max`` and ``slope_epsilon`` default to
    relative values derived from each video's own area series when None."""

    strategy: str = "fixed_track"
    crop_fraction: float = 0.5
    threshold_k: float = 1.0
    padding_fraction: float = 0.10
    zoom_rmse_max: float | None = None
    slope_epsilon: float | None = None
    smoothing_window: int = 1

    def __post_init__(self):
        if self.strategy not in PLAN_STRATEGIES:
            raise InvalidArgumentError(
                f"unknown strategy {self.strategy!r}, expected one of {PLAN_STRATEGIES}"
            )
        if not (0.0 < self.crop_fraction <= 1.0):
            raise InvalidArgumentError("crop_fraction must be in (0, 1]")
        if self.threshold_k < 0:
            raise InvalidArgumentError("threshold_k must be >= 0")
        if self.padding_fraction < 0:
            raise InvalidArgumentError("padding_fraction must be >= 0")
        if self.zoom_rmse_max is not None and self.zoom_rmse_max <= 0:
            raise InvalidArgumentError("zoom_rmse_max must be > 0")
        if self.slope_epsilon is not None and self.slope_epsilon < 0:
            raise InvalidArgumentError("slope_epsilon must be >= 0")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise InvalidArgumentError("smoothing_window must be an odd integer >= 1")


def fit_linear_zoom(areas, slope_epsilon: float | None = None) -> ZoomFit:
    """Ordinary least squares of sqrt(area) against sample position 0..n-1.

    The square root smooths the series so a window growing linearly per axis
    shows up as a straight line. ``slope_epsilon`` separates "increasing" /
    "decreasing" from "neither"; when None it defaults to
    ``DEFAULT_SLOPE_FRACTION * mean(sqrt(area))`` per sample step.
    """
    areas = [float(a) for a in areas]
    if len(areas) < 2:
        raise InvalidArgumentError("zoom fit needs at least 2 area samples")
    if any(a < 0 for a in areas):
        raise InvalidArgumentError("areas must be non-negative")
    roots = [math.sqrt(a) for a in areas]
    n = len(roots)
    xs = range(n)
    x_mean = (n - 1) / 2.0
    y_mean = sum(roots) / n
    sxx = sum((x - x_mean) ** 2 for x in xs)
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, roots))
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    residuals = [y - (intercept + slope * x) for x, y in zip(xs, roots)]
    rmse = math.sqrt(sum(r * r for r in residuals) / n)
    eps = DEFAULT_SLOPE_FRACTION * y_mean if slope_epsilon is None else slope_epsilon
    if slope > eps:
        direction = "increasing"
    elif slope < -eps:
        direction = "decreasing"
    else:
        direction = "neither"
    return ZoomFit(slope=slope, intercept=intercept, rmse=rmse, direction=direction)


def default_zoom_rmse_max(areas) -> float:
    """Relative fit-error budget: DEFAULT_RMSE_FRACTION * mean(sqrt(area))."""
    areas = [float(a) for a in areas]
    if not areas:
        raise InvalidArgumentError("need at least one area")
    return DEFAULT_RMSE_FRACTION * (sum(math.sqrt(a) for a in areas) / len(areas))


def select_for_zoom(fit: ZoomFit, zoom_rmse_max: float) -> bool:
    """A video gets the linear zoom only when the line fits tightly and the
    trend is clearly increasing or decreasing."""
    return fit.rmse <= zoom_rmse_max and fit.direction != "neither"


def smooth_centroids(centroids, window: int) -> list[Centroid]:
    """Centered moving average of centroid positions, truncated at the edges.

    Window 1 is the identity.
    """
    if window < 1 or window % 2 == 0:
        raise InvalidArgumentError("smoothing window must be an odd integer >= 1")
    centroids = list(centroids)
    if window == 1:
        return centroids
    half = window // 2
    out = []
    for i in range(len(centroids)):
        lo = max(0, i - half)
        hi = min(len(centroids), i + half + 1)
        span = centroids[lo:hi]
        out.append(
            Centroid(
                sum(c.x for c in span) / len(span),
                sum(c.y for c in span) / len(span),
            )
        )
    return out


def _fit_size_to_frame(w_req: float, h_req: float, src_w: int, src_h: int) -> tuple[int, int]:
    """Integer crop size at the source aspect ratio, within [min side, frame]."""
    min_w = min(MIN_CROP_SIDE, src_w)
    min_h = min(MIN_CROP_SIDE, src_h)
    w_req = max(w_req, float(min_w))
    h_req = max(h_req, float(min_h))
    aspect = src_w / src_h
    if h_req * aspect >= w_req:
        w_req = h_req * aspect
    else:
        h_req = w_req / aspect
    w_req = min(w_req, float(src_w))
    h_req = min(h_req, float(src_h))
    wi = min(max(round_half_up(w_req), min_w), src_w)
    hi = min(max(round_half_up(h_req), min_h), src_h)
    return wi, hi


def _padded_region_size(
    stats: RegionStats, src_w: int, src_h: int, padding_fraction: float
) -> tuple[float, float]:
    # An empty mask means nothing stood out; treat the whole frame as salient.
    if stats.bbox is None:
        return float(src_w), float(src_h)
    scale = 1.0 + padding_fraction
    return stats.bbox.w * scale, stats.bbox.h * scale


def center_crop_plan(
    src_w: int,
    src_h: int,
    frame_indices,
    crop_fraction: float,
    video_id: str = "",
) -> CropTrajectory:
    """A centered window scaled per axis (not by area), identical every frame."""
    if not (0.0 < crop_fraction <= 1.0):
        raise InvalidArgumentError("crop_fraction must be in (0, 1]")
    indices = list(frame_indices)
    if not indices:
        raise InvalidArgumentError("frame_indices must be nonempty")
    w = round_half_up(crop_fraction * src_w)
    h = round_half_up(crop_fraction * src_h)
    if w < 1 or h < 1:
        raise InvalidArgumentError(
            f"crop_fraction {crop_fraction} yields a {w}x{h} window on {src_w}x{src_h}"
        )
    rect = clamp_rect(src_w / 2.0, src_h / 2.0, w, h, src_w, src_h)
    return CropTrajectory(
        video_id=video_id,
        src_width=src_w,
        src_height=src_h,
        rects=tuple((i, rect) for i in indices),
        strategy="center",
    )


def fixed_track_plan(
    centroids,
    stats,
    src_w: int,
    src_h: int,
    cfg: PlanConfig,
    frame_indices=None,
    video_id: str = "",
) -> CropTrajectory:
    """One window size for the whole video, tracking the saliency centroid.

    The size is the smallest window (after padding and aspect correction)
    that contains every sampled frame's salient bounding box.
    """
    centroids = list(centroids)
    stats = list(stats)
    if not centroids or len(centroids) != len(stats):
        raise InvalidArgumentError("need matching, nonempty centroids and stats")
    indices = list(frame_indices) if frame_indices is not None else list(range(len(centroids)))
    if len(indices) != len(centroids):
        raise InvalidArgumentError("frame_indices must align with centroids")
    padded = [_padded_region_size(s, src_w, src_h, cfg.padding_fraction) for s in stats]
    w_req = max(p[0] for p in padded)
    h_req = max(p[1] for p in padded)
    w, h = _fit_size_to_frame(w_req, h_req, src_w, src_h)
    tracked = smooth_centroids(centroids, cfg.smoothing_window)
    rects = tuple(
        (idx, clamp_rect(c.x, c.y, w, h, src_w, src_h))
        for idx, c in zip(indices, tracked)
    )
    return CropTrajectory(
        video_id=video_id,
        src_width=src_w,
        src_height=src_h,
        rects=rects,
        strategy="fixed_track",
    )


def variable_track_plan(
    centroids,
    stats,
    fit: ZoomFit,
    src_w: int,
    src_h: int,
    cfg: PlanConfig,
    frame_indices=None,
    video_id: str = "",
) -> CropTrajectory:
    """Centroid tracking with window area following the fitted linear zoom.

    The target area at sample position i is ``(intercept + slope*i)**2``
    scaled by ``(1 + padding_fraction)**2``, shaped to the source aspect
    ratio. Callers must check :func:`select_for_zoom` first and fall back to
    :func:`fixed_track_plan` when it rejects the fit.
    """
    if fit.direction == "neither":
        raise InvalidArgumentError("variable tracking needs an increasing or decreasing fit")
    centroids = list(centroids)
    stats = list(stats)
    if not centroids or len(centroids) != len(stats):
        raise InvalidArgumentError("need matching, nonempty centroids and stats")
    indices = list(frame_indices) if frame_indices is not None else list(range(len(centroids)))
    if len(indices) != len(centroids):
        raise InvalidArgumentError("frame_indices must align with centroids")
    pad_scale = 1.0 + cfg.padding_fraction
    root_aspect = math.sqrt(src_w / src_h)
    tracked = smooth_centroids(centroids, cfg.smoothing_window)
    rects = []
    for i, (idx, c) in enumerate(zip(indices, tracked)):
        side = (fit.intercept + fit.slope * i) * pad_scale
        w, h = _fit_size_to_frame(side * root_aspect, side / root_aspect, src_w, src_h)
        rects.append((idx, clamp_rect(c.x, c.y, w, h, src_w, src_h)))
    return CropTrajectory(
        video_id=video_id,
        src_width=src_w,
        src_height=src_h,
        rects=tuple(rects),
        strategy="variable_track",
    )


def plan(analysis: VideoSaliencyAnalysis, cfg: PlanConfig) -> CropTrajectory:
    """Dispatch to the configured strategy.

    ``variable_track`` degrades to fixed tracking (with ``fallback=True`` in
    the trajectory metadata) when the area series is too short, does not fit
    a line well, or has no clear trend.
    """
    if cfg.strategy == "center":
        return center_crop_plan(
            analysis.src_width,
            analysis.src_height,
            analysis.frame_indices,
            cfg.crop_fraction,
            video_id=analysis.video_id,
        )
    if cfg.strategy == "fixed_track":
        return fixed_track_plan(
            analysis.centroids,
            analysis.stats,
            analysis.src_width,
            analysis.src_height,
            cfg,
            frame_indices=analysis.frame_indices,
            video_id=analysis.video_id,
        )
    areas = analysis.areas
    eligible = False
    fit = None
    if len(areas) >= 2:
        fit = fit_linear_zoom(areas, cfg.slope_epsilon)
        rmse_max = cfg.zoom_rmse_max
        if rmse_max is None:
            rmse_max = default_zoom_rmse_max(areas)
        eligible = select_for_zoom(fit, rmse_max)
    if not eligible:
        fallback = fixed_track_plan(
            analysis.centroids,
            analysis.stats,
            analysis.src_width,
            analysis.src_height,
            cfg,
            frame_indices=analysis.frame_indices,
            video_id=analysis.video_id,
        )
        return CropTrajectory(
            video_id=fallback.video_id,
            src_width=fallback.src_width,
            src_height=fallback.src_height,
            rects=fallback.rects,
            strategy="variable_track",
            fallback=True,
        )
    return variable_track_plan(
        analysis.centroids,
        analysis.stats,
        fit,
        analysis.src_width,
        analysis.src_height,
        cfg,
        frame_indices=analysis.frame_indices,
        video_id=analysis.video_id,
    )
