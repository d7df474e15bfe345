"""Pydantic request/response models for the HTTP service.

These mirror the core config dataclasses field for field; ``to_config``
builds the validated core objects (range errors surface as HTTP 400).
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel

from ..metrics import DEFAULT_THRESHOLDS
from ..planner import PlanConfig
from ..render import RenderConfig
from ..saliency import SaliencyBackendConfig
from ..scoring import ScorerConfig


class SaliencyOptions(BaseModel):
    kind: Literal["spectral_residual", "file_store"] = "spectral_residual"
    directory: str | None = None
    blur_radius: int = 8

    def to_config(self) -> SaliencyBackendConfig:
        return SaliencyBackendConfig(
            kind=self.kind, directory=self.directory, blur_radius=self.blur_radius
        )


class PlanOptions(BaseModel):
    strategy: Literal["center", "fixed_track", "variable_track"] = "fixed_track"
    crop_fraction: float = 0.5
    threshold_k: float = 1.0
    padding_fraction: float = 0.10
    zoom_rmse_max: float | None = None
    slope_epsilon: float | None = None
    smoothing_window: int = 1

    def to_config(self) -> PlanConfig:
        return PlanConfig(
            strategy=self.strategy,
            crop_fraction=self.crop_fraction,
            threshold_k=self.threshold_k,
            padding_fraction=self.padding_fraction,
            zoom_rmse_max=self.zoom_rmse_max,
            slope_epsilon=self.slope_epsilon,
            smoothing_window=self.smoothing_window,
        )


class RenderOptions(BaseModel):
    resize_to_source: bool = True
    interpolation: Literal["nearest", "bilinear"] = "bilinear"

    def to_config(self) -> RenderConfig:
        return RenderConfig(
            resize_to_source=self.resize_to_source, interpolation=self.interpolation
        )


class ScorerOptions(BaseModel):
    kind: Literal["file_store", "constant", "synthetic_contrast"] = "synthetic_contrast"
    path: str | None = None
    value: float = 0.5

    def to_config(self) -> ScorerConfig:
        return ScorerConfig(kind=self.kind, path=self.path, value=self.value)


class HealthResponse(BaseModel):
    status: str
    version: str


class SaliencyRequest(BaseModel):
    video_roots: list[str]
    backend: SaliencyOptions = SaliencyOptions()
    threshold_k: float = 1.0
    stride: int = 10
    sample_offset: int = 0
    out_dir: str | None = None


class FrameSaliencyModel(BaseModel):
    frame_index: int
    centroid_x: float
    centroid_y: float
    area: float


class VideoSaliencyModel(BaseModel):
    video_id: str
    width: int
    height: int
    frames: list[FrameSaliencyModel]
    map_paths: list[str]


class SaliencyResponse(BaseModel):
    videos: list[VideoSaliencyModel]


class PlanRequest(BaseModel):
    video_roots: list[str]
    saliency: SaliencyOptions = SaliencyOptions()
    plan: PlanOptions = PlanOptions()
    stride: int = 10
    sample_offset: int = 0
    centroid_on_mask: bool = False
    out_dir: str | None = None


class RectModel(BaseModel):
    frame_index: int
    x: int
    y: int
    w: int
    h: int


class TrajectoryModel(BaseModel):
    video_id: str
    src_width: int
    src_height: int
    strategy: str
    fallback: bool
    rects: list[RectModel]


class PlanResponse(BaseModel):
    trajectories: list[TrajectoryModel]


class RenderJob(BaseModel):
    frames_dir: str
    trajectory: str


class RenderRequest(BaseModel):
    jobs: list[RenderJob]
    render: RenderOptions = RenderOptions()
    out_root: str


class RenderedVideoModel(BaseModel):
    video_id: str
    frames: int
    out_dir: str


class RenderResponse(BaseModel):
    videos: list[RenderedVideoModel]


class ScoreRequest(BaseModel):
    video_roots: list[str]
    scorer: ScorerOptions = ScorerOptions()
    stride: int = 10
    sample_offset: int = 0
    out_csv: str | None = None
    per_frame_csv: str | None = None


class VideoScoreModel(BaseModel):
    video_id: str
    score: float


class ScoreResponse(BaseModel):
    scores: list[VideoScoreModel]


class EvaluateRequest(BaseModel):
    before_csv: str
    after_csv: str
    out_csv: str | None = None


class EvaluationRecordModel(BaseModel):
    video_id: str
    score_before: float
    score_after: float
    delta: float


class EvaluateResponse(BaseModel):
    records: list[EvaluationRecordModel]
    improved: int
    decreased: int
    unchanged: int


class ReportRequest(BaseModel):
    evaluation_csv: str
    out_dir: str
    thresholds: list[float] = list(DEFAULT_THRESHOLDS)
    label: str = "run"
    compare_csv: str | None = None
    compare_labels: tuple[str, str] = ("fixed", "variable")


class ReportResponse(BaseModel):
    outputs: dict[str, str]


class RunRequest(BaseModel):
    video_roots: list[str]
    output_root: str
    plan: PlanOptions = PlanOptions()
    render: RenderOptions = RenderOptions()
    scorer: ScorerOptions = ScorerOptions()
    saliency: SaliencyOptions = SaliencyOptions()
    stride: int = 10
    sample_offset: int = 0
    centroid_on_mask: bool = False
    workers: int | None = None
    fail_fast: bool = False
    save_frames: bool = False
    thresholds: list[float] = list(DEFAULT_THRESHOLDS)


class FailureModel(BaseModel):
    video_id: str
    error: str


class RunResponse(BaseModel):
    processed: int
    improved: int
    decreased: int
    unchanged: int
    failures: list[FailureModel]
    outputs: dict[str, str]
