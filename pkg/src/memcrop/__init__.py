"""Saliency-guided video cropping with memorability scoring and reports."""

from .errors import (
    BackendError,
    DimensionMismatchError,
    InputFormatError,
    InvalidArgumentError,
    MemcropError,
    MissingScoreError,
)
from .frames import (
    CropRect,
    CropTrajectory,
    Frame,
    FrameSequence,
    clamp_rect,
    sample_frame_indices,
)
from .metrics import EvaluationRecord, ScoreSeries
from .pipeline import PipelineManifest, PipelineResult, run_pipeline
from .planner import PlanConfig, ZoomFit, fit_linear_zoom, plan, select_for_zoom
from .render import RenderConfig, crop_frame, render_video, resize_frame
from .saliency import (
    BinaryMask,
    Centroid,
    RegionStats,
    SaliencyBackendConfig,
    SaliencyMap,
    analyze_sequence,
    area_series,
    binarize,
    compute_saliency,
    region_stats,
    saliency_centroid,
    spectral_residual_saliency,
)
from .scoring import MemorabilityScore, ScorerConfig, score_frame, score_video

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "BinaryMask",
    "Centroid",
    "CropRect",
    "CropTrajectory",
    "DimensionMismatchError",
    "EvaluationRecord",
    "Frame",
    "FrameSequence",
    "InputFormatError",
    "InvalidArgumentError",
    "MemcropError",
    "MemorabilityScore",
    "MissingScoreError",
    "PipelineManifest",
    "PipelineResult",
    "PlanConfig",
    "RegionStats",
    "RenderConfig",
    "SaliencyBackendConfig",
    "SaliencyMap",
    "ScoreSeries",
    "ScorerConfig",
    "ZoomFit",
    "analyze_sequence",
    "area_series",
    "binarize",
    "clamp_rect",
    "compute_saliency",
    "crop_frame",
    "fit_linear_zoom",
    "plan",
    "region_stats",
    "render_video",
    "resize_frame",
    "run_pipeline",
    "saliency_centroid",
    "sample_frame_indices",
    "score_frame",
    "score_video",
    "select_for_zoom",
    "spectral_residual_saliency",
]
