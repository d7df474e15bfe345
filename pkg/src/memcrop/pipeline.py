"""End-to-end batch runs: saliency -> plan -> render -> score -> report.

Videos are independent, so a run fans them out over a process pool (width
from the ``MEMCROP_WORKERS`` environment variable, then the manifest, then
the CPU count) and reduces the completed records single-threaded. All file
writes go to per-run unique paths, and results are emitted in sorted video
order, so identical manifests produce byte-identical outputs.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from . import charts, metrics, storage
from .errors import InvalidArgumentError, MemcropError
from .metrics import DEFAULT_THRESHOLDS, EvaluationRecord
from .planner import PlanConfig, plan
from .render import RenderConfig, render_video
from .saliency import SaliencyBackendConfig, analyze_sequence
from .scoring import ScorerConfig, build_scorer, score_video


@dataclass(frozen=True)
class PipelineManifest:
    """One batch run: where the videos live, how to process them, and where
    outputs go."""

    video_roots: tuple[str, ...]
    output_root: str
    plan: PlanConfig = PlanConfig()
    render: RenderConfig = RenderConfig()
    scorer: ScorerConfig = ScorerConfig()
    saliency: SaliencyBackendConfig = SaliencyBackendConfig()
    stride: int = 10
    sample_offset: int = 0
    centroid_on_mask: bool = False
    workers: int | None = None
    fail_fast: bool = False
    save_frames: bool = False
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS

    def __post_init__(self):
        object.__setattr__(self, "video_roots", tuple(str(r) for r in self.video_roots))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        if not self.video_roots:
            raise InvalidArgumentError("manifest needs at least one video root")
        if self.stride < 1:
            raise InvalidArgumentError("stride must be >= 1")
        if self.sample_offset < 0:
            raise InvalidArgumentError("sample_offset must be >= 0")
        if self.workers is not None and self.workers < 1:
            raise InvalidArgumentError("workers must be >= 1")


@dataclass(frozen=True)
class VideoOutcome:
    video_id: str
    record: EvaluationRecord | None = None
    trajectory: object = None
    error: str | None = None


@dataclass
class PipelineResult:
    records: list[EvaluationRecord]
    failures: list[tuple[str, str]]
    outputs: dict[str, Path] = field(default_factory=dict)

    @property
    def partition(self) -> tuple[int, int, int]:
        return metrics.improvement_partition(self.records)


def resolve_workers(requested: int | None = None) -> int:
    """Worker-pool width: MEMCROP_WORKERS env var wins, then the explicit
    request, then the machine's CPU count."""
    env = os.environ.get("MEMCROP_WORKERS")
    if env:
        try:
            width = int(env)
        except ValueError as exc:
            raise InvalidArgumentError(f"MEMCROP_WORKERS must be an integer, got {env!r}") from exc
        if width < 1:
            raise InvalidArgumentError(f"MEMCROP_WORKERS must be >= 1, got {width}")
        return width
    if requested is not None:
        if requested < 1:
            raise InvalidArgumentError("workers must be >= 1")
        return requested
    return max(1, os.cpu_count() or 1)


def discover_videos(video_roots) -> list[tuple[str, Path]]:
    """(video_id, directory) pairs for every subdirectory of the roots."""
    found: dict[str, Path] = {}
    for root in video_roots:
        root = Path(root)
        if not root.is_dir():
            raise InvalidArgumentError(f"video root not found: {root}")
        for sub in sorted(p for p in root.iterdir() if p.is_dir()):
            if sub.name in found:
                raise InvalidArgumentError(
                    f"duplicate video id {sub.name!r} in {root} and {found[sub.name].parent}"
                )
            found[sub.name] = sub
    if not found:
        raise InvalidArgumentError(f"no video directories under {list(video_roots)}")
    return sorted(found.items())


@lru_cache(maxsize=8)
def _cached_scorer(config: ScorerConfig):
    # One scorer per process; file stores load their CSV once.
    return build_scorer(config)


def process_video(video_id: str, video_dir: str, manifest: PipelineManifest) -> VideoOutcome:
    """Run the full per-video pipeline; exceptions become recorded failures."""
    try:
        seq = storage.ingest_frames(video_dir, video_id)
        analysis = analyze_sequence(
            seq,
            manifest.saliency,
            threshold_k=manifest.plan.threshold_k,
            stride=manifest.stride,
            offset=manifest.sample_offset,
            centroid_on_mask=manifest.centroid_on_mask,
        )
        trajectory = plan(analysis, manifest.plan)
        rendered = render_video(seq, trajectory, manifest.render)
        scorer = _cached_scorer(manifest.scorer)
        before = score_video(seq, scorer, manifest.stride, manifest.sample_offset).value
        after = score_video(rendered, scorer, manifest.stride, manifest.sample_offset).value
        if manifest.save_frames:
            storage.write_frames(rendered, Path(manifest.output_root) / "frames" / video_id)
        record = EvaluationRecord(video_id, before, after)
        return VideoOutcome(video_id=video_id, record=record, trajectory=trajectory)
    except MemcropError as exc:
        return VideoOutcome(video_id=video_id, error=f"{type(exc).__name__}: {exc}")


def _run_tasks(tasks, manifest: PipelineManifest):
    width = resolve_workers(manifest.workers)
    if width == 1 or len(tasks) <= 1:
        for video_id, video_dir in tasks:
            yield process_video(video_id, str(video_dir), manifest)
        return
    with ProcessPoolExecutor(max_workers=width) as pool:
        ids = [t[0] for t in tasks]
        dirs = [str(t[1]) for t in tasks]
        yield from pool.map(process_video, ids, dirs, [manifest] * len(tasks), chunksize=8)


class VideoProcessingFailed(MemcropError):
    """Raised in fail-fast mode when a video cannot be processed."""

    def __init__(self, video_id: str, message: str):
        super().__init__(f"video {video_id!r} failed: {message}")
        self.video_id = video_id


def run_pipeline(manifest: PipelineManifest) -> PipelineResult:
    """Process every video under the manifest's roots and write the
    evaluation CSV, per-video trajectories, and metric reports."""
    tasks = discover_videos(manifest.video_roots)
    out_root = Path(manifest.output_root)
    out_root.mkdir(parents=True, exist_ok=True)

    records: list[EvaluationRecord] = []
    trajectories = []
    failures: list[tuple[str, str]] = []
    for outcome in _run_tasks(tasks, manifest):
        if outcome.error is not None:
            if manifest.fail_fast:
                raise VideoProcessingFailed(outcome.video_id, outcome.error)
            failures.append((outcome.video_id, outcome.error))
            continue
        records.append(outcome.record)
        trajectories.append(outcome.trajectory)

    result = PipelineResult(records=records, failures=failures)

    traj_dir = out_root / "trajectories"
    for trajectory in trajectories:
        path = traj_dir / f"{trajectory.video_id}.jsonl"
        storage.write_trajectory(trajectory, path)
    if trajectories:
        result.outputs["trajectories"] = traj_dir

    eval_path = out_root / "evaluation.csv"
    storage.write_evaluation_csv(records, eval_path)
    result.outputs["evaluation"] = eval_path

    if failures:
        errors_path = out_root / "errors.csv"
        with open(errors_path, "w", newline="") as fh:
            fh.write("video_id,error\n")
            for video_id, message in failures:
                fh.write(f"{video_id},{message.replace(chr(10), ' ')}\n")
        result.outputs["errors"] = errors_path

    if records:
        label = _run_label(manifest.plan)
        report_paths = write_reports(
            records, out_root / "reports", thresholds=manifest.thresholds, label=label
        )
        result.outputs.update(report_paths)
    return result


def _run_label(plan_cfg: PlanConfig) -> str:
    if plan_cfg.strategy == "center":
        return f"center_{plan_cfg.crop_fraction:g}"
    return plan_cfg.strategy


def write_reports(records, out_dir, thresholds=DEFAULT_THRESHOLDS, label: str = "run") -> dict[str, Path]:
    """Emit the metric report files for one set of evaluation records."""
    records = list(records)
    if not records:
        raise InvalidArgumentError("cannot report on zero records")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, Path] = {}

    partition = metrics.improvement_partition(records)
    partition_path = out_dir / "partition.csv"
    storage.write_partition_csv(partition, partition_path)
    outputs["partition"] = partition_path

    table = metrics.threshold_table(records, thresholds)
    table_path = out_dir / "threshold_table.csv"
    storage.write_threshold_table_csv(table, table_path)
    outputs["threshold_table"] = table_path

    deltas = metrics.delta_series(records)
    values = list(deltas.values)
    # Outlier removal needs at least 4 deltas; tiny runs plot unfiltered.
    if len(values) >= 4:
        values = metrics.iqr_filter(values)
    curve = metrics.cumulative_mean(metrics.ScoreSeries(tuple(values), deltas.order_key))
    curve_path = out_dir / "cumulative_mean.csv"
    storage.write_curve_csv({label: curve}, curve_path)
    outputs["cumulative_mean"] = curve_path

    svg_path = out_dir / "cumulative_mean.svg"
    charts.emit_plot(
        [(label, curve)],
        svg_path,
        title="Cumulative mean of score change",
        x_label="videos by ascending original score",
        y_label="cumulative mean delta",
    )
    outputs["cumulative_mean_svg"] = svg_path

    summary = metrics.range_summary({label: [r.score_after for r in records]})
    summary_path = out_dir / "range_summary.csv"
    storage.write_range_summary_csv(summary, summary_path)
    outputs["range_summary"] = summary_path
    return outputs


def paired_delta_series(records_a, records_b) -> tuple[metrics.ScoreSeries, metrics.ScoreSeries]:
    """Delta series for two runs over the same videos, in one shared order
    (ascending original score of the first run)."""
    by_id_b = {r.video_id: r for r in records_b}
    ids_a = {r.video_id for r in records_a}
    if ids_a != set(by_id_b):
        raise InvalidArgumentError("the two runs cover different video sets")
    ordered = sorted(records_a, key=lambda r: (r.score_before, r.video_id))
    series_a = metrics.ScoreSeries(tuple(r.delta for r in ordered), "score_before_asc")
    series_b = metrics.ScoreSeries(
        tuple(by_id_b[r.video_id].delta for r in ordered), "score_before_asc"
    )
    return series_a, series_b


def write_comparison_report(records_a, records_b, out_dir, labels=("fixed", "variable")) -> dict[str, Path]:
    """Aligned cumulative-mean curves for two runs (e.g. fixed vs variable)."""
    series_a, series_b = paired_delta_series(records_a, records_b)
    curves = metrics.compare_runs(series_a, series_b)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, Path] = {}
    curve_path = out_dir / "cumulative_mean_comparison.csv"
    storage.write_curve_csv(
        {labels[0]: list(curves.fixed), labels[1]: list(curves.variable)}, curve_path
    )
    outputs["cumulative_mean_comparison"] = curve_path
    svg_path = out_dir / "cumulative_mean_comparison.svg"
    charts.emit_plot(
        [(labels[0], list(curves.fixed)), (labels[1], list(curves.variable))],
        svg_path,
        title="Cumulative mean of score change",
        x_label="videos by ascending original score",
        y_label="cumulative mean delta",
    )
    outputs["cumulative_mean_comparison_svg"] = svg_path
    return outputs
