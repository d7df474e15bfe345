import numpy as np
import pytest

from memcrop.cli import main
from memcrop.storage import (
    ingest_frames,
    read_evaluation_csv,
    read_trajectory,
    read_video_scores_csv,
    write_frames,
)

from synth import blob_video


@pytest.fixture()
def video_root(tmp_path):
    root = tmp_path / "videos"
    for i in range(2):
        seq = blob_video(f"vid{i}", 20, 48, 36, seed=60 + i,
                         start_radius=6.0, radius_growth=0.5, drift=(1.0, 0.5))
        write_frames(seq, root / f"vid{i}")
    return root


def test_saliency_command(video_root, tmp_path, capsys):
    out = tmp_path / "maps"
    code = main(["saliency", "--videos", str(video_root), "--output", str(out)])
    assert code == 0
    assert (out / "vid0" / "000000.png").exists()
    assert "vid0" in capsys.readouterr().out


def test_plan_and_render_commands(video_root, tmp_path):
    traj_dir = tmp_path / "traj"
    code = main(["plan", "--videos", str(video_root), "--output", str(traj_dir),
                 "--strategy", "fixed_track"])
    assert code == 0
    traj = read_trajectory(traj_dir / "vid0.jsonl")
    assert traj.strategy == "fixed_track"

    out = tmp_path / "rendered"
    code = main(["render", "--videos", str(video_root), "--trajectories", str(traj_dir),
                 "--output", str(out)])
    assert code == 0
    rendered = ingest_frames(out / "vid0")
    assert len(rendered) == 20
    assert rendered.width == 48


def test_render_requires_inputs(tmp_path):
    code = main(["render", "--output", str(tmp_path / "o")])
    assert code == 2


def test_score_evaluate_report_commands(video_root, tmp_path):
    before = tmp_path / "before.csv"
    assert main(["score", "--videos", str(video_root), "--output", str(before)]) == 0
    scores = read_video_scores_csv(before)
    assert set(scores) == {"vid0", "vid1"}

    evaluation = tmp_path / "evaluation.csv"
    assert main(["evaluate", "--before", str(before), "--after", str(before),
                 "--output", str(evaluation)]) == 0
    records = read_evaluation_csv(evaluation)
    assert all(r.delta == 0 for r in records)

    reports = tmp_path / "reports"
    assert main(["report", "--evaluation", str(evaluation), "--output", str(reports)]) == 0
    assert (reports / "threshold_table.csv").exists()
    assert (reports / "cumulative_mean.svg").exists()


def test_score_per_frame_feeds_file_store_scorer(video_root, tmp_path):
    per_frame = tmp_path / "frames.csv"
    before = tmp_path / "before.csv"
    assert main(["score", "--videos", str(video_root), "--output", str(before),
                 "--per-frame", str(per_frame)]) == 0
    # the per-frame CSV round-trips through the file_store scorer
    again = tmp_path / "again.csv"
    assert main(["score", "--videos", str(video_root), "--output", str(again),
                 "--scorer", "file_store", "--scores-csv", str(per_frame)]) == 0
    assert read_video_scores_csv(before) == read_video_scores_csv(again)


def test_plan_centroid_on_mask_flag(video_root, tmp_path):
    out = tmp_path / "traj"
    code = main(["plan", "--videos", str(video_root), "--output", str(out),
                 "--centroid-on-mask"])
    assert code == 0
    assert (out / "vid0.jsonl").exists()


def test_run_command(video_root, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", "--videos", str(video_root), "--output", str(out),
                 "--scorer", "constant", "--constant-value", "0.4", "--workers", "1"])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "2 videos processed" in stdout
    assert "0 improved, 0 decreased, 2 unchanged" in stdout
    assert (out / "evaluation.csv").exists()


def test_run_reports_video_failures(video_root, tmp_path):
    bad = video_root / "vid9"
    bad.mkdir()
    (bad / "000000.png").write_bytes(b"junk")
    out = tmp_path / "out"
    code = main(["run", "--videos", str(video_root), "--output", str(out), "--workers", "1"])
    assert code == 4
    assert (out / "errors.csv").exists()


def test_run_fail_fast(video_root, tmp_path):
    bad = video_root / "vid0" / "000000.png"
    bad.write_bytes(b"junk")
    out = tmp_path / "out"
    code = main(["run", "--videos", str(video_root), "--output", str(out),
                 "--workers", "1", "--fail-fast"])
    assert code == 4


def test_invalid_config_value_exits_2(video_root, tmp_path):
    code = main(["run", "--videos", str(video_root), "--output", str(tmp_path / "o"),
                 "--crop-fraction", "0", "--workers", "1"])
    assert code == 2


def test_malformed_input_file_exits_3(tmp_path):
    bad = tmp_path / "eval.csv"
    bad.write_text("wrong,header\n1,2\n")
    code = main(["report", "--evaluation", str(bad), "--output", str(tmp_path / "r")])
    assert code == 3


def test_unknown_flag_exits_2(video_root, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--videos", str(video_root), "--output", str(tmp_path), "--bogus"])
    assert exc.value.code == 2


def test_config_file_defaults_and_override(video_root, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("scorer=constant\nconstant_value=0.25\nstride=5\n")
    out = tmp_path / "out"
    code = main(["run", "--videos", str(video_root), "--output", str(out),
                 "--config", str(cfg), "--workers", "1"])
    assert code == 0
    records = read_evaluation_csv(out / "evaluation.csv")
    assert all(r.score_before == 0.25 for r in records)

    # an explicit flag beats the file value
    out2 = tmp_path / "out2"
    code = main(["run", "--videos", str(video_root), "--output", str(out2),
                 "--config", str(cfg), "--constant-value", "0.75", "--workers", "1"])
    assert code == 0
    records = read_evaluation_csv(out2 / "evaluation.csv")
    assert all(r.score_before == 0.75 for r in records)


def test_config_file_unknown_key(video_root, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("not_a_key=1\n")
    code = main(["run", "--videos", str(video_root), "--output", str(tmp_path / "o"),
                 "--config", str(cfg), "--workers", "1"])
    assert code == 2
