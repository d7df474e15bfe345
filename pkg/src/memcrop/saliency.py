"""Per-frame saliency maps and the statistics the crop planner consumes.

Two backends produce maps: a built-in classical spectral-residual detector
(so the pipeline runs without any pretrained model), and a file store that
reads maps exported by an external model, one 8-bit grayscale PNG or CSV
grid per sampled frame under ``<dir>/<video_id>/<frame_index>.png|.csv``.

From a map we derive the attention-weighted centroid, a binary mask of
salient pixels (threshold mean + k*std), the mask's pixel area and tight
bounding box, and the per-video area series that drives zoom fitting.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import BackendError, DimensionMismatchError, InvalidArgumentError
from .frames import CropRect, Frame, FrameSequence, sample_frame_indices

SALIENCY_BACKEND_KINDS = ("spectral_residual", "file_store")


class SaliencyMap:
    """Per-pixel attention weights in [0, 1] for one frame."""

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        arr = np.asarray(values)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidArgumentError(
                f"saliency values must be a (height, width) grid, got shape {arr.shape}"
            )
        if np.any(~np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise InvalidArgumentError("saliency values must all lie in [0, 1]")
        arr = np.ascontiguousarray(arr)
        view = arr.view()
        view.flags.writeable = False
        self.values = view

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


class BinaryMask:
    """Boolean grid marking the salient pixels of one frame."""

    __slots__ = ("bits",)

    def __init__(self, bits: np.ndarray):
        arr = np.asarray(bits)
        if arr.ndim != 2 or arr.dtype != np.bool_:
            raise InvalidArgumentError("mask bits must be a 2-D boolean grid")
        arr = np.ascontiguousarray(arr)
        view = arr.view()
        view.flags.writeable = False
        self.bits = view

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass(frozen=True)
class Centroid:
    x: float
    y: float


@dataclass(frozen=True)
class RegionStats:
    """Pixel count and tight bounding box of a mask; bbox is None when empty."""

    area: int
    bbox: CropRect | None


@dataclass(frozen=True)
class SaliencyBackendConfig:
    """Which saliency source to use and its parameters.

    ``spectral_residual`` uses ``blur_radius``; ``file_store`` reads
    precomputed maps from ``directory``.
    """

    kind: str = "spectral_residual"
    directory: str | None = None
    blur_radius: int = 8

    def __post_init__(self):
        if self.kind not in SALIENCY_BACKEND_KINDS:
            raise InvalidArgumentError(
                f"unknown saliency backend {self.kind!r}, expected one of {SALIENCY_BACKEND_KINDS}"
            )
        if self.blur_radius < 0:
            raise InvalidArgumentError("blur_radius must be >= 0")
        if self.kind == "file_store" and not self.directory:
            raise InvalidArgumentError("file_store saliency backend needs a directory")


def _luminance(frame: Frame) -> np.ndarray:
    px = frame.pixels.astype(np.float32)
    return (
        299.0 * px[:, :, 0] + 587.0 * px[:, :, 1] + 114.0 * px[:, :, 2]
    ) * np.float32(1e-3)


#: Width of the mean filter applied to the log spectrum. 5 suppresses the
#: periodic residual combs that sharp synthetic shapes leave at 3.
_SPECTRUM_SMOOTH = 5


def _mirror_column(grid: np.ndarray, col_full: int, width_full: int) -> np.ndarray:
    """Column `col_full` of the full (conjugate-symmetric) spectrum grid,
    reconstructed from the rfft2 half grid: F[u, c] = F[-u mod h, -c mod w]."""
    c = col_full % width_full
    if c < grid.shape[1]:
        return grid[:, c]
    mirror = (width_full - c) % width_full
    return np.roll(grid[::-1, mirror], 1)


def _half_spectrum_box(grid: np.ndarray, width_full: int, size: int = _SPECTRUM_SMOOTH) -> np.ndarray:
    """size x size circular mean of the full spectrum, computed on the rfft2
    half grid. Rows are all present (plain circular sum); missing neighbor
    columns are reconstructed via conjugate symmetry."""
    r = size // 2
    h, wh = grid.shape
    acc = grid.copy()
    for d in range(1, r + 1):
        acc += np.roll(grid, d, axis=0)
        acc += np.roll(grid, -d, axis=0)
    ext = np.empty((h, wh + 2 * r), dtype=grid.dtype)
    ext[:, r : r + wh] = acc
    for d in range(1, r + 1):
        ext[:, r - d] = _mirror_column(acc, -d, width_full)
        ext[:, r + wh - 1 + d] = _mirror_column(acc, wh - 1 + d, width_full)
    total = ext[:, 0:wh].copy()
    for k in range(1, 2 * r + 1):
        total += ext[:, k : k + wh]
    return total / np.asarray(size * size, dtype=grid.dtype)


def _blur_separable(grid: np.ndarray, radius: int) -> np.ndarray:
    """Gaussian blur with support exactly `radius` (sigma = radius/2),
    edge-clamped; radius 0 is the identity."""
    if radius <= 0:
        return grid
    sigma = max(radius / 2.0, 0.5)
    # truncate=2.0 makes the kernel radius int(2*sigma + 0.5) == radius
    return ndimage.gaussian_filter(grid, sigma=sigma, truncate=2.0, mode="nearest")


def spectral_residual_saliency(frame: Frame, blur_radius: int = 8) -> SaliencyMap:
    """Classical spectral-residual saliency, max-normalized to [0, 1].

    A featureless frame (all pixels equal, including the 1x1 case) has no
    spectrum to analyze and maps to all zeros.
    """
    if blur_radius < 0:
        raise InvalidArgumentError("blur_radius must be >= 0")
    gray = _luminance(frame)
    if gray.size == 1 or float(gray.max()) == float(gray.min()):
        return SaliencyMap(np.zeros_like(gray))
    h, w = gray.shape
    # real-input FFT: the half spectrum carries everything (the composed
    # spectrum below is conjugate-symmetric, so its inverse is real)
    spectrum = np.fft.rfft2(gray)
    amplitude = np.abs(spectrum)
    # log1p keeps exact spectral nulls finite; plain log explodes under exp().
    log_amplitude = np.log1p(amplitude)
    residual = log_amplitude - _half_spectrum_box(log_amplitude, w)
    # exp(residual) * unit-phase, without the complex exp: scale each spectrum
    # bin to the residual amplitude while keeping its phase.
    scale = np.exp(residual, out=residual)
    nonzero = amplitude > 0.0
    np.divide(scale, amplitude, out=scale, where=nonzero)
    composed = spectrum * scale
    if not nonzero.all():
        composed[~nonzero] = scale[~nonzero]
    back = np.fft.irfft2(composed, s=(h, w))
    raw = np.square(back)
    smoothed = _blur_separable(raw, blur_radius)
    peak = float(smoothed.max())
    if peak > 0.0:
        smoothed = smoothed / np.float32(peak)
    return SaliencyMap(np.clip(smoothed, 0.0, 1.0))


def _load_stored_map(directory: str, video_id: str, frame_index: int) -> SaliencyMap:
    from . import storage

    base = Path(directory) / video_id
    candidates = [
        base / f"{frame_index:06d}.png",
        base / f"{frame_index}.png",
        base / f"{frame_index:06d}.csv",
        base / f"{frame_index}.csv",
    ]
    for path in candidates:
        if path.exists():
            return storage.read_saliency_map(path)
    raise BackendError(
        f"no stored saliency map for video {video_id!r} frame {frame_index} under {base}"
    )


def compute_saliency(
    frame: Frame,
    backend: SaliencyBackendConfig,
    video_id: str = "",
    frame_index: int = 0,
) -> SaliencyMap:
    """Produce the saliency map for one frame via the configured backend.

    File-store maps are returned verbatim (their [0, 1] range is validated at
    read time); both the centroid and the mean+k*std mask are invariant to
    positive rescaling, so stored maps need no renormalization.
    """
    if backend.kind == "spectral_residual":
        return spectral_residual_saliency(frame, backend.blur_radius)
    stored = _load_stored_map(backend.directory, video_id, frame_index)
    if stored.width != frame.width or stored.height != frame.height:
        raise DimensionMismatchError(
            f"stored saliency map is {stored.width}x{stored.height}, "
            f"frame is {frame.width}x{frame.height}"
        )
    return stored


def saliency_centroid(saliency: SaliencyMap) -> Centroid:
    """Attention-weighted mean pixel coordinate of a map.

    x averages column indices and y averages row indices, each weighted by
    the map value. An all-zero map yields the geometric frame center.
    """
    values = saliency.values
    total = float(values.sum())
    if total == 0.0:
        return Centroid((saliency.width - 1) / 2.0, (saliency.height - 1) / 2.0)
    cols = np.arange(saliency.width, dtype=np.float64)
    rows = np.arange(saliency.height, dtype=np.float64)
    x = float((values.sum(axis=0) * cols).sum() / total)
    y = float((values.sum(axis=1) * rows).sum() / total)
    return Centroid(x, y)


def binarize(saliency: SaliencyMap, k: float) -> BinaryMask:
    """Mask of pixels strictly above mean + k * population std of the map."""
    if k < 0:
        raise InvalidArgumentError(f"threshold multiplier k must be >= 0, got {k}")
    values = saliency.values
    threshold = float(values.mean()) + k * float(values.std())
    return BinaryMask(values > threshold)


def region_stats(mask: BinaryMask) -> RegionStats:
    """Area (pixel count) and tight bounding box of the true bits."""
    rows, cols = np.nonzero(mask.bits)
    if rows.size == 0:
        return RegionStats(area=0, bbox=None)
    x0 = int(cols.min())
    y0 = int(rows.min())
    bbox = CropRect(x0, y0, int(cols.max()) - x0 + 1, int(rows.max()) - y0 + 1)
    return RegionStats(area=int(rows.size), bbox=bbox)


def area_series(maps, k: float) -> list[float]:
    """Salient-region area of each map at threshold multiplier k."""
    maps = list(maps)
    if not maps:
        raise InvalidArgumentError("area_series needs at least one map")
    w, h = maps[0].width, maps[0].height
    for i, m in enumerate(maps):
        if m.width != w or m.height != h:
            raise DimensionMismatchError(
                f"map {i} is {m.width}x{m.height}, expected {w}x{h}"
            )
    return [float(region_stats(binarize(m, k)).area) for m in maps]


@dataclass(frozen=True)
class VideoSaliencyAnalysis:
    """Everything the planner needs about one video's sampled frames."""

    video_id: str
    src_width: int
    src_height: int
    frame_indices: tuple[int, ...]
    centroids: tuple[Centroid, ...]
    stats: tuple[RegionStats, ...]

    def __post_init__(self):
        if not (len(self.frame_indices) == len(self.centroids) == len(self.stats)):
            raise InvalidArgumentError("analysis fields must have equal lengths")

    @property
    def areas(self) -> list[float]:
        return [float(s.area) for s in self.stats]


def analyze_sequence(
    seq: FrameSequence,
    backend: SaliencyBackendConfig,
    threshold_k: float = 1.0,
    stride: int = 10,
    offset: int = 0,
    centroid_on_mask: bool = False,
) -> VideoSaliencyAnalysis:
    """Run the saliency backend over the sampled frames of one video.

    ``centroid_on_mask`` computes the centroid on the thresholded map instead
    of the raw one (raw is the default).
    """
    indices = sample_frame_indices(len(seq), stride, offset)
    centroids = []
    stats = []
    for idx in indices:
        saliency = compute_saliency(seq[idx], backend, seq.video_id, idx)
        mask = binarize(saliency, threshold_k)
        if centroid_on_mask:
            masked = SaliencyMap(np.where(mask.bits, saliency.values, 0.0))
            centroids.append(saliency_centroid(masked))
        else:
            centroids.append(saliency_centroid(saliency))
        stats.append(region_stats(mask))
    return VideoSaliencyAnalysis(
        video_id=seq.video_id,
        src_width=seq.width,
        src_height=seq.height,
        frame_indices=tuple(indices),
        centroids=tuple(centroids),
        stats=tuple(stats),
    )
