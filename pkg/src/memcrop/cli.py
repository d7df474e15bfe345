"""Command-line interface.

Every pipeline stage is its own subcommand so externally produced artifacts
(saliency maps, score CSVs, trajectories) can be dropped in between stages:

    memcrop saliency --videos data/videos --output out/maps
    memcrop plan     --videos data/videos --strategy variable_track --output out/traj
    memcrop render   --frames data/videos/vid01 --trajectory out/traj/vid01.jsonl --output out/frames
    memcrop score    --videos data/videos --output out/before.csv
    memcrop evaluate --before out/before.csv --after out/after.csv --output out/evaluation.csv
    memcrop report   --evaluation out/evaluation.csv --output out/reports
    memcrop run      --videos data/videos --output out/run
    memcrop serve    --host 127.0.0.1 --port 8000

Flags mirror the config field names; a ``--config`` file of ``key=value``
lines supplies defaults that explicit flags override. Exit codes: 0 success,
2 invalid arguments or configuration, 3 malformed input file, 4 per-video
processing failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import stages
from .errors import BackendError, InputFormatError, InvalidArgumentError, MemcropError
from .metrics import DEFAULT_THRESHOLDS
from .pipeline import PipelineManifest, VideoProcessingFailed, run_pipeline
from .planner import PLAN_STRATEGIES, PlanConfig
from .render import INTERPOLATION_MODES, RenderConfig
from .saliency import SALIENCY_BACKEND_KINDS, SaliencyBackendConfig
from .scoring import SCORER_KINDS, ScorerConfig

EXIT_OK = 0
EXIT_INVALID_ARGS = 2
EXIT_BAD_INPUT = 3
EXIT_VIDEO_FAILURE = 4

_DEFAULTS = {
    "stride": 10,
    "sample_offset": 0,
    "saliency_backend": "spectral_residual",
    "saliency_dir": None,
    "blur_radius": 8,
    "strategy": "fixed_track",
    "crop_fraction": 0.5,
    "threshold_k": 1.0,
    "centroid_on_mask": False,
    "padding_fraction": 0.10,
    "zoom_rmse_max": None,
    "slope_epsilon": None,
    "smoothing_window": 1,
    "resize_to_source": True,
    "interpolation": "bilinear",
    "scorer": "synthetic_contrast",
    "scores_csv": None,
    "constant_value": 0.5,
    "workers": None,
    "fail_fast": False,
    "save_frames": False,
    "thresholds": ",".join(f"{t:.2f}" for t in DEFAULT_THRESHOLDS),
    "label": "run",
}

_PARSERS = {
    "stride": int,
    "sample_offset": int,
    "blur_radius": int,
    "crop_fraction": float,
    "threshold_k": float,
    "padding_fraction": float,
    "zoom_rmse_max": float,
    "slope_epsilon": float,
    "smoothing_window": int,
    "constant_value": float,
    "workers": int,
    "resize_to_source": lambda s: _parse_bool(s, "resize_to_source"),
    "fail_fast": lambda s: _parse_bool(s, "fail_fast"),
    "save_frames": lambda s: _parse_bool(s, "save_frames"),
    "centroid_on_mask": lambda s: _parse_bool(s, "centroid_on_mask"),
}


def _parse_bool(text: str, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise InvalidArgumentError(f"config key {key} must be a boolean, got {text!r}")


def read_config_file(path) -> dict[str, str]:
    """Flat key=value lines; blank lines and ``#`` comments are ignored."""
    path = Path(path)
    if not path.exists():
        raise InvalidArgumentError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _DEFAULTS:
            raise InvalidArgumentError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


class Settings:
    """Resolved option values: explicit flag > config file > default."""

    def __init__(self, args: argparse.Namespace):
        self._args = args
        self._file = read_config_file(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str):
        value = getattr(self._args, key, None)
        if value is not None:
            return value
        if key in self._file:
            parse = _PARSERS.get(key, str)
            return parse(self._file[key])
        return _DEFAULTS[key]

    def saliency_config(self) -> SaliencyBackendConfig:
        return SaliencyBackendConfig(
            kind=self.get("saliency_backend"),
            directory=self.get("saliency_dir"),
            blur_radius=self.get("blur_radius"),
        )

    def plan_config(self) -> PlanConfig:
        return PlanConfig(
            strategy=self.get("strategy"),
            crop_fraction=self.get("crop_fraction"),
            threshold_k=self.get("threshold_k"),
            padding_fraction=self.get("padding_fraction"),
            zoom_rmse_max=self.get("zoom_rmse_max"),
            slope_epsilon=self.get("slope_epsilon"),
            smoothing_window=self.get("smoothing_window"),
        )

    def render_config(self) -> RenderConfig:
        return RenderConfig(
            resize_to_source=self.get("resize_to_source"),
            interpolation=self.get("interpolation"),
        )

    def scorer_config(self) -> ScorerConfig:
        return ScorerConfig(
            kind=self.get("scorer"),
            path=self.get("scores_csv"),
            value=self.get("constant_value"),
        )

    def thresholds(self) -> tuple[float, ...]:
        raw = self.get("thresholds")
        if isinstance(raw, tuple):
            return raw
        try:
            return tuple(float(v) for v in str(raw).split(",") if v.strip())
        except ValueError as exc:
            raise InvalidArgumentError(f"bad thresholds list {raw!r}") from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--stride", type=int, help="sample every Nth frame (default 10)")
    parser.add_argument("--sample-offset", dest="sample_offset", type=int,
                        help="index of the first sampled frame (default 0)")


def _add_saliency_opts(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--saliency-backend", dest="saliency_backend",
                        choices=SALIENCY_BACKEND_KINDS, help="saliency source")
    parser.add_argument("--saliency-dir", dest="saliency_dir",
                        help="stored-map directory for the file_store backend")
    parser.add_argument("--blur-radius", dest="blur_radius", type=int,
                        help="post-blur radius of the built-in detector")
    parser.add_argument("--threshold-k", dest="threshold_k", type=float,
                        help="salient-pixel threshold: mean + k*std (default 1.0)")


def _add_plan_opts(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strategy", choices=PLAN_STRATEGIES, help="cropping strategy")
    parser.add_argument("--crop-fraction", dest="crop_fraction", type=float,
                        help="per-axis crop fraction for the center strategy")
    parser.add_argument("--padding-fraction", dest="padding_fraction", type=float,
                        help="context margin around the salient region")
    parser.add_argument("--zoom-rmse-max", dest="zoom_rmse_max", type=float,
                        help="max fit error to allow linear zoom (default relative)")
    parser.add_argument("--slope-epsilon", dest="slope_epsilon", type=float,
                        help="min slope magnitude counted as a trend (default relative)")
    parser.add_argument("--smoothing-window", dest="smoothing_window", type=int,
                        help="odd moving-average window for centroid tracks")
    parser.add_argument("--centroid-on-mask", dest="centroid_on_mask",
                        action=argparse.BooleanOptionalAction, default=None,
                        help="track the centroid of the thresholded map instead of the raw map")


def _add_render_opts(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--resize-to-source", dest="resize_to_source",
                        action=argparse.BooleanOptionalAction, default=None,
                        help="resize crops back to source dims (default on)")
    parser.add_argument("--interpolation", choices=INTERPOLATION_MODES,
                        help="resampling mode (default bilinear)")


def _add_scorer_opts(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scorer", choices=SCORER_KINDS, help="memorability scorer")
    parser.add_argument("--scores-csv", dest="scores_csv",
                        help="per-frame scores CSV for the file_store scorer")
    parser.add_argument("--constant-value", dest="constant_value", type=float,
                        help="value returned by the constant scorer")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memcrop",
        description="Saliency-guided video cropping with memorability scoring",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("saliency", help="compute saliency maps and region stats")
    _add_common(p)
    _add_saliency_opts(p)
    p.add_argument("--videos", action="append", required=True,
                   help="root directory of <video_id>/NNNNNN.png trees (repeatable)")
    p.add_argument("--output", help="directory to export grayscale PNG maps into")

    p = sub.add_parser("plan", help="plan crop trajectories")
    _add_common(p)
    _add_saliency_opts(p)
    _add_plan_opts(p)
    p.add_argument("--videos", action="append", required=True)
    p.add_argument("--output", required=True, help="directory for <video_id>.jsonl files")

    p = sub.add_parser("render", help="apply trajectories to frame sequences")
    _add_common(p)
    _add_render_opts(p)
    p.add_argument("--frames", help="one video's frame directory")
    p.add_argument("--trajectory", help="trajectory file for --frames")
    p.add_argument("--videos", action="append", help="video root (with --trajectories)")
    p.add_argument("--trajectories", help="directory of <video_id>.jsonl files")
    p.add_argument("--output", required=True)

    p = sub.add_parser("score", help="score videos for memorability")
    _add_common(p)
    _add_scorer_opts(p)
    p.add_argument("--videos", action="append", required=True)
    p.add_argument("--output", required=True, help="video-level scores CSV")
    p.add_argument("--per-frame", dest="per_frame", help="optional per-frame scores CSV")

    p = sub.add_parser("evaluate", help="join before/after score CSVs")
    _add_common(p)
    p.add_argument("--before", required=True, help="video scores CSV before cropping")
    p.add_argument("--after", required=True, help="video scores CSV after cropping")
    p.add_argument("--output", required=True, help="evaluation CSV to write")

    p = sub.add_parser("report", help="metric reports from an evaluation CSV")
    _add_common(p)
    p.add_argument("--evaluation", required=True)
    p.add_argument("--output", required=True, help="report directory")
    p.add_argument("--thresholds", help="comma-separated initial-score thresholds")
    p.add_argument("--label", help="curve label for this run")
    p.add_argument("--compare", help="second evaluation CSV for paired curves")

    p = sub.add_parser("run", help="full pipeline: saliency, plan, render, score, report")
    _add_common(p)
    _add_saliency_opts(p)
    _add_plan_opts(p)
    _add_render_opts(p)
    _add_scorer_opts(p)
    p.add_argument("--videos", action="append", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--workers", type=int, help="worker pool width (MEMCROP_WORKERS overrides)")
    p.add_argument("--thresholds", help="comma-separated initial-score thresholds")
    p.add_argument("--fail-fast", dest="fail_fast", action=argparse.BooleanOptionalAction,
                   default=None, help="abort on the first failing video")
    p.add_argument("--save-frames", dest="save_frames", action=argparse.BooleanOptionalAction,
                   default=None, help="write the rendered frames as PNG sequences")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_saliency(args) -> int:
    settings = Settings(args)
    summaries = stages.saliency_stage(
        args.videos,
        settings.saliency_config(),
        threshold_k=settings.get("threshold_k"),
        stride=settings.get("stride"),
        offset=settings.get("sample_offset"),
        out_dir=args.output,
    )
    for s in summaries:
        areas = ",".join(f"{f.area:g}" for f in s.frames)
        print(f"{s.video_id}: {len(s.frames)} frames analyzed, areas [{areas}]")
    if args.output:
        print(f"maps written under {args.output}")
    return EXIT_OK


def _cmd_plan(args) -> int:
    settings = Settings(args)
    trajectories = stages.plan_stage(
        args.videos,
        settings.saliency_config(),
        settings.plan_config(),
        stride=settings.get("stride"),
        offset=settings.get("sample_offset"),
        centroid_on_mask=settings.get("centroid_on_mask"),
        out_dir=args.output,
    )
    for t in trajectories:
        note = " (fell back to fixed tracking)" if t.fallback else ""
        print(f"{t.video_id}: {t.strategy}{note}, {len(t.rects)} rects")
    return EXIT_OK


def _cmd_render(args) -> int:
    settings = Settings(args)
    if args.frames and args.trajectory:
        jobs = [(args.frames, args.trajectory)]
    elif args.videos and args.trajectories:
        from .pipeline import discover_videos

        traj_dir = Path(args.trajectories)
        jobs = [
            (video_dir, traj_dir / f"{video_id}.jsonl")
            for video_id, video_dir in discover_videos(args.videos)
        ]
    else:
        raise InvalidArgumentError(
            "render needs either --frames with --trajectory, or --videos with --trajectories"
        )
    results = stages.render_stage(jobs, settings.render_config(), args.output)
    for r in results:
        print(f"{r['video_id']}: {r['frames']} frames -> {r['out_dir']}")
    return EXIT_OK


def _cmd_score(args) -> int:
    settings = Settings(args)
    scores = stages.score_stage(
        args.videos,
        settings.scorer_config(),
        stride=settings.get("stride"),
        offset=settings.get("sample_offset"),
        out_csv=args.output,
        per_frame_csv=args.per_frame,
    )
    for video_id, value in scores:
        print(f"{video_id}: {value:.6f}")
    print(f"{len(scores)} videos scored -> {args.output}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    records = stages.evaluate_stage(args.before, args.after, out_csv=args.output)
    improved = sum(1 for r in records if r.delta > 0)
    decreased = sum(1 for r in records if r.delta < 0)
    unchanged = len(records) - improved - decreased
    print(f"{len(records)} videos: {improved} improved, {decreased} decreased, "
          f"{unchanged} unchanged -> {args.output}")
    return EXIT_OK


def _cmd_report(args) -> int:
    settings = Settings(args)
    outputs = stages.report_stage(
        args.evaluation,
        args.output,
        thresholds=settings.thresholds(),
        label=settings.get("label"),
        compare_csv=args.compare,
    )
    for name, path in outputs.items():
        print(f"{name}: {path}")
    return EXIT_OK


def _cmd_run(args) -> int:
    settings = Settings(args)
    manifest = PipelineManifest(
        video_roots=tuple(args.videos),
        output_root=args.output,
        plan=settings.plan_config(),
        render=settings.render_config(),
        scorer=settings.scorer_config(),
        saliency=settings.saliency_config(),
        stride=settings.get("stride"),
        sample_offset=settings.get("sample_offset"),
        centroid_on_mask=settings.get("centroid_on_mask"),
        workers=settings.get("workers"),
        fail_fast=settings.get("fail_fast"),
        save_frames=settings.get("save_frames"),
        thresholds=settings.thresholds(),
    )
    result = run_pipeline(manifest)
    improved, decreased, unchanged = result.partition
    print(f"{len(result.records)} videos processed: {improved} improved, "
          f"{decreased} decreased, {unchanged} unchanged")
    for name, path in result.outputs.items():
        print(f"{name}: {path}")
    if result.failures:
        for video_id, message in result.failures:
            print(f"FAILED {video_id}: {message}", file=sys.stderr)
        return EXIT_VIDEO_FAILURE
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_HANDLERS = {
    "saliency": _cmd_saliency,
    "plan": _cmd_plan,
    "render": _cmd_render,
    "score": _cmd_score,
    "evaluate": _cmd_evaluate,
    "report": _cmd_report,
    "run": _cmd_run,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except VideoProcessingFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIDEO_FAILURE
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_ARGS
    except (InputFormatError, BackendError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except MemcropError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
