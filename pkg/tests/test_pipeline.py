import numpy as np
import pytest

from memcrop.errors import InvalidArgumentError
from memcrop.pipeline import (
    PipelineManifest,
    VideoProcessingFailed,
    discover_videos,
    resolve_workers,
    run_pipeline,
    write_comparison_report,
)
from memcrop.planner import PlanConfig
from memcrop.metrics import EvaluationRecord
from memcrop.render import RenderConfig
from memcrop.saliency import SaliencyBackendConfig
from memcrop.scoring import ScorerConfig
from memcrop.storage import read_evaluation_csv, write_frames

from synth import blob_video, flat_video, noise_video


def make_root(tmp_path, videos, name="videos"):
    root = tmp_path / name
    for seq in videos:
        write_frames(seq, root / seq.video_id)
    return root


def manifest_for(root, out, **overrides):
    defaults = dict(
        video_roots=(str(root),),
        output_root=str(out),
        plan=PlanConfig(strategy="fixed_track"),
        render=RenderConfig(),
        scorer=ScorerConfig(kind="synthetic_contrast"),
        saliency=SaliencyBackendConfig(blur_radius=4),
        stride=10,
        workers=1,
    )
    defaults.update(overrides)
    return PipelineManifest(**defaults)


def small_videos(n=3, frames=20, w=48, h=36, seed0=100):
    return [blob_video(f"vid{i:02d}", frames, w, h, seed=seed0 + i,
                       start_radius=6.0, radius_growth=0.5, drift=(1.0, 0.5))
            for i in range(n)]


def test_resolve_workers_env_override(monkeypatch):
    monkeypatch.setenv("MEMCROP_WORKERS", "3")
    assert resolve_workers(8) == 3
    monkeypatch.delenv("MEMCROP_WORKERS")
    assert resolve_workers(8) == 8
    assert resolve_workers(None) >= 1
    monkeypatch.setenv("MEMCROP_WORKERS", "zero")
    with pytest.raises(InvalidArgumentError):
        resolve_workers(None)


def test_discover_videos_sorted(tmp_path):
    root = make_root(tmp_path, small_videos(3, frames=2, w=8, h=8))
    found = discover_videos([str(root)])
    assert [vid for vid, _ in found] == ["vid00", "vid01", "vid02"]


def test_discover_videos_duplicate_ids(tmp_path):
    root_a = make_root(tmp_path, small_videos(1, frames=1, w=8, h=8), name="a")
    root_b = make_root(tmp_path, small_videos(1, frames=1, w=8, h=8), name="b")
    with pytest.raises(InvalidArgumentError):
        discover_videos([str(root_a), str(root_b)])


def test_constant_scorer_yields_zero_deltas(tmp_path):
    root = make_root(tmp_path, small_videos(3))
    out = tmp_path / "out"
    manifest = manifest_for(root, out, scorer=ScorerConfig(kind="constant", value=0.5))
    result = run_pipeline(manifest)
    assert len(result.records) == 3
    assert result.partition == (0, 0, 3)
    assert all(r.delta == 0.0 for r in result.records)


def test_identity_center_crop_keeps_scores(tmp_path):
    root = make_root(tmp_path, small_videos(3))
    out = tmp_path / "out"
    manifest = manifest_for(root, out, plan=PlanConfig(strategy="center", crop_fraction=1.0))
    result = run_pipeline(manifest)
    for record in result.records:
        assert record.score_after == pytest.approx(record.score_before, abs=1e-12)


def test_tracking_bright_square_raises_contrast(tmp_path):
    videos = [
        blob_video(f"v{i}", 20, 96, 72, seed=7 + i, start_radius=9.0,
                   radius_growth=0.3, drift=(2.0, 1.0), noise_amplitude=4)
        for i in range(2)
    ]
    root = make_root(tmp_path, videos)
    out = tmp_path / "out"
    manifest = manifest_for(root, out)
    result = run_pipeline(manifest)
    assert len(result.records) == 2
    for record in result.records:
        assert record.delta > 0


def test_outputs_written(tmp_path):
    root = make_root(tmp_path, small_videos(4))
    out = tmp_path / "out"
    result = run_pipeline(manifest_for(root, out))
    assert (out / "evaluation.csv").exists()
    assert sorted(p.name for p in (out / "trajectories").iterdir()) == [
        "vid00.jsonl", "vid01.jsonl", "vid02.jsonl", "vid03.jsonl",
    ]
    reports = out / "reports"
    for name in (
        "partition.csv",
        "threshold_table.csv",
        "cumulative_mean.csv",
        "cumulative_mean.svg",
        "range_summary.csv",
    ):
        assert (reports / name).exists()
    loaded = read_evaluation_csv(out / "evaluation.csv")
    assert loaded == result.records


def test_save_frames_flag(tmp_path):
    root = make_root(tmp_path, small_videos(1, frames=12))
    out = tmp_path / "out"
    run_pipeline(manifest_for(root, out, save_frames=True))
    frames = sorted(p.name for p in (out / "frames" / "vid00").iterdir())
    assert frames == [f"{i:06d}.png" for i in range(12)]


def test_pipeline_deterministic(tmp_path):
    videos = small_videos(3)
    root = make_root(tmp_path, videos)

    def run(name):
        out = tmp_path / name
        run_pipeline(manifest_for(root, out))
        data = {}
        for p in sorted(out.rglob("*")):
            if p.is_file():
                data[str(p.relative_to(out))] = p.read_bytes()
        return data

    assert run("out_a") == run("out_b")


def test_per_video_failures_recorded(tmp_path):
    root = make_root(tmp_path, small_videos(2))
    bad = root / "vid99"
    bad.mkdir()
    (bad / "000000.png").write_bytes(b"broken")
    out = tmp_path / "out"
    result = run_pipeline(manifest_for(root, out))
    assert len(result.records) == 2
    assert len(result.failures) == 1
    assert result.failures[0][0] == "vid99"
    assert (out / "errors.csv").exists()


def test_fail_fast_raises(tmp_path):
    root = make_root(tmp_path, small_videos(1))
    bad = root / "vid99"
    bad.mkdir()
    (bad / "000000.png").write_bytes(b"broken")
    out = tmp_path / "out"
    with pytest.raises(VideoProcessingFailed):
        run_pipeline(manifest_for(root, out, fail_fast=True))


def test_worker_pool_matches_serial(tmp_path):
    videos = small_videos(4, frames=12, w=32, h=24)
    root = make_root(tmp_path, videos)
    serial = run_pipeline(manifest_for(root, tmp_path / "serial", workers=1))
    pooled = run_pipeline(manifest_for(root, tmp_path / "pooled", workers=2))
    assert serial.records == pooled.records
    assert (tmp_path / "serial" / "evaluation.csv").read_bytes() == (
        tmp_path / "pooled" / "evaluation.csv"
    ).read_bytes()


def test_flat_video_scores_zero(tmp_path):
    root = make_root(tmp_path, [flat_video("flat", 12, 32, 24)])
    out = tmp_path / "out"
    result = run_pipeline(manifest_for(root, out))
    assert result.records[0].score_before == 0.0


def test_file_store_saliency_backend(tmp_path):
    from memcrop.saliency import SaliencyMap
    from memcrop.storage import write_saliency_map

    videos = [noise_video("n0", 12, 24, 18, seed=3)]
    root = make_root(tmp_path, videos)
    store = tmp_path / "maps"
    rng = np.random.default_rng(1)
    for idx in (0, 10):
        values = rng.uniform(0.0, 1.0, (18, 24))
        write_saliency_map(SaliencyMap(values), store / "n0" / f"{idx:06d}.png")
    out = tmp_path / "out"
    manifest = manifest_for(
        root, out, saliency=SaliencyBackendConfig(kind="file_store", directory=str(store))
    )
    result = run_pipeline(manifest)
    assert len(result.records) == 1
    assert not result.failures


def test_comparison_report(tmp_path):
    rng = np.random.default_rng(8)
    records_a = [
        EvaluationRecord(f"v{i}", float(rng.uniform(0.2, 0.8)), float(rng.uniform(0.2, 0.8)))
        for i in range(20)
    ]
    records_b = [
        EvaluationRecord(r.video_id, r.score_before, min(1.0, r.score_after + 0.01))
        for r in records_a
    ]
    out = tmp_path / "cmp"
    paths = write_comparison_report(records_a, records_b, out)
    assert paths["cumulative_mean_comparison"].exists()
    text = paths["cumulative_mean_comparison_svg"].read_text()
    assert text.count("<polyline") == 2
