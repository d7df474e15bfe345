"""Individually invocable pipeline stages.

Each stage works from files and writes files, so any step can be replaced by
externally produced artifacts: export saliency maps here, plan from someone
else's maps, score with an external model's CSV, and so on. The CLI and the
HTTP service are both thin wrappers over these functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import storage
from .errors import InvalidArgumentError
from .frames import sample_frame_indices
from .metrics import DEFAULT_THRESHOLDS, EvaluationRecord
from .pipeline import discover_videos, write_comparison_report, write_reports
from .planner import PlanConfig, plan
from .render import RenderConfig, render_video
from .saliency import (
    SaliencyBackendConfig,
    analyze_sequence,
    binarize,
    compute_saliency,
    region_stats,
    saliency_centroid,
)
from .scoring import ScorerConfig, build_scorer, score_frame


@dataclass(frozen=True)
class FrameSaliencySummary:
    frame_index: int
    centroid_x: float
    centroid_y: float
    area: float


@dataclass(frozen=True)
class VideoSaliencySummary:
    video_id: str
    width: int
    height: int
    frames: tuple[FrameSaliencySummary, ...]
    map_paths: tuple[str, ...] = ()


def saliency_stage(
    video_roots,
    backend: SaliencyBackendConfig,
    threshold_k: float = 1.0,
    stride: int = 10,
    offset: int = 0,
    out_dir=None,
) -> list[VideoSaliencySummary]:
    """Compute (or re-read) per-frame saliency for every video; optionally
    export the maps as grayscale PNGs laid out for the file_store backend."""
    summaries = []
    for video_id, video_dir in discover_videos(video_roots):
        seq = storage.ingest_frames(video_dir, video_id)
        indices = sample_frame_indices(len(seq), stride, offset)
        frames = []
        paths = []
        for idx in indices:
            saliency = compute_saliency(seq[idx], backend, video_id, idx)
            centroid = saliency_centroid(saliency)
            stats = region_stats(binarize(saliency, threshold_k))
            frames.append(
                FrameSaliencySummary(
                    frame_index=idx,
                    centroid_x=centroid.x,
                    centroid_y=centroid.y,
                    area=float(stats.area),
                )
            )
            if out_dir is not None:
                path = Path(out_dir) / video_id / f"{idx:06d}.png"
                storage.write_saliency_map(saliency, path)
                paths.append(str(path))
        summaries.append(
            VideoSaliencySummary(
                video_id=video_id,
                width=seq.width,
                height=seq.height,
                frames=tuple(frames),
                map_paths=tuple(paths),
            )
        )
    return summaries


def plan_stage(
    video_roots,
    saliency_backend: SaliencyBackendConfig,
    plan_cfg: PlanConfig,
    stride: int = 10,
    offset: int = 0,
    centroid_on_mask: bool = False,
    out_dir=None,
):
    """Plan a crop trajectory per video; optionally write the JSONL files."""
    trajectories = []
    for video_id, video_dir in discover_videos(video_roots):
        seq = storage.ingest_frames(video_dir, video_id)
        analysis = analyze_sequence(
            seq,
            saliency_backend,
            threshold_k=plan_cfg.threshold_k,
            stride=stride,
            offset=offset,
            centroid_on_mask=centroid_on_mask,
        )
        trajectory = plan(analysis, plan_cfg)
        if out_dir is not None:
            storage.write_trajectory(trajectory, Path(out_dir) / f"{video_id}.jsonl")
        trajectories.append(trajectory)
    return trajectories


def render_stage(jobs, render_cfg: RenderConfig, out_root) -> list[dict]:
    """Apply trajectory files to frame directories.

    ``jobs`` is a list of (frames_dir, trajectory_path) pairs; each rendered
    video lands under ``<out_root>/<video_id>/``.
    """
    jobs = list(jobs)
    if not jobs:
        raise InvalidArgumentError("render needs at least one (frames, trajectory) job")
    results = []
    for frames_dir, traj_path in jobs:
        seq = storage.ingest_frames(frames_dir)
        trajectory = storage.read_trajectory(traj_path)
        rendered = render_video(seq, trajectory, render_cfg)
        out_dir = Path(out_root) / seq.video_id
        storage.write_frames(rendered, out_dir)
        results.append(
            {"video_id": seq.video_id, "frames": len(rendered), "out_dir": str(out_dir)}
        )
    return results


def score_stage(
    video_roots,
    scorer_cfg: ScorerConfig,
    stride: int = 10,
    offset: int = 0,
    out_csv=None,
    per_frame_csv=None,
) -> list[tuple[str, float]]:
    """Score every video (mean over sampled frames); optionally write the
    video-level and per-frame CSVs."""
    scorer = build_scorer(scorer_cfg)
    video_scores = []
    frame_rows = []
    for video_id, video_dir in discover_videos(video_roots):
        seq = storage.ingest_frames(video_dir, video_id)
        indices = sample_frame_indices(len(seq), stride, offset)
        values = []
        for idx in indices:
            value = score_frame(seq[idx], scorer, video_id, idx).value
            values.append(value)
            frame_rows.append((video_id, idx, value))
        video_scores.append((video_id, sum(values) / len(values)))
    if out_csv is not None:
        storage.write_video_scores_csv(video_scores, out_csv)
    if per_frame_csv is not None:
        storage.write_frame_scores_csv(frame_rows, per_frame_csv)
    return video_scores


def evaluate_stage(before_csv, after_csv, out_csv=None) -> list[EvaluationRecord]:
    """Join before/after video-score CSVs into evaluation records.

    The two files must cover exactly the same video ids.
    """
    before = storage.read_video_scores_csv(before_csv)
    after = storage.read_video_scores_csv(after_csv)
    if set(before) != set(after):
        missing_after = sorted(set(before) - set(after))
        missing_before = sorted(set(after) - set(before))
        raise InvalidArgumentError(
            f"score CSVs cover different videos (only-before: {missing_after[:5]}, "
            f"only-after: {missing_before[:5]})"
        )
    records = [EvaluationRecord(vid, before[vid], after[vid]) for vid in sorted(before)]
    if out_csv is not None:
        storage.write_evaluation_csv(records, out_csv)
    return records


def report_stage(
    evaluation_csv,
    out_dir,
    thresholds=DEFAULT_THRESHOLDS,
    label: str = "run",
    compare_csv=None,
    compare_labels=("fixed", "variable"),
) -> dict[str, Path]:
    """Metric reports (and plots) from an evaluation CSV; with
    ``compare_csv`` also the paired fixed-vs-variable curves."""
    records = storage.read_evaluation_csv(evaluation_csv)
    if not records:
        raise InvalidArgumentError(f"no records in {evaluation_csv}")
    outputs = write_reports(records, out_dir, thresholds=thresholds, label=label)
    if compare_csv is not None:
        records_b = storage.read_evaluation_csv(compare_csv)
        outputs.update(
            write_comparison_report(records, records_b, out_dir, labels=compare_labels)
        )
    return outputs
