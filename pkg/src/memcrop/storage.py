"""File formats: PNG frame sequences, saliency stores, score CSVs,
evaluation CSVs, and trajectory JSON-lines.

Videos arrive as directories of zero-padded PNG frames
(``<root>/<video_id>/000000.png``); container decoding is left to external
tooling. All writers produce byte-identical output for identical input.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DimensionMismatchError, InputFormatError, InvalidArgumentError
from .frames import CropRect, CropTrajectory, Frame, FrameSequence
from .metrics import EvaluationRecord, RangeSummaryRow, ThresholdRow
from .saliency import SaliencyMap

FRAME_NAME_FORMAT = "{:06d}.png"


def read_frame_png(path) -> Frame:
    path = Path(path)
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            return Frame(np.asarray(rgb, dtype=np.uint8))
    except (UnidentifiedImageError, OSError) as exc:
        raise InputFormatError(f"unreadable frame image {path}: {exc}") from exc


def write_frame_png(frame: Frame, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(frame.pixels), mode="RGB").save(path, format="PNG")


def ingest_frames(directory, video_id: str | None = None) -> FrameSequence:
    """Load one video's frames, ordered by filename; dims must all match."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InputFormatError(f"frame directory not found: {directory}")
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() == ".png")
    if not files:
        raise InputFormatError(f"no PNG frames in {directory}")
    frames = [read_frame_png(p) for p in files]
    w, h = frames[0].width, frames[0].height
    for path, frame in zip(files, frames):
        if frame.width != w or frame.height != h:
            raise InputFormatError(
                f"{path} is {frame.width}x{frame.height}, expected {w}x{h} "
                f"(mixed dimensions in {directory})"
            )
    return FrameSequence(video_id if video_id is not None else directory.name, frames)


def write_frames(seq: FrameSequence, directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, frame in enumerate(seq):
        path = directory / FRAME_NAME_FORMAT.format(i)
        write_frame_png(frame, path)
        paths.append(path)
    return paths


def read_saliency_map(path) -> SaliencyMap:
    """Read one stored map: 8-bit grayscale PNG (value/255) or a CSV grid of
    reals in [0, 1]."""
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"saliency map not found: {path}")
    if path.suffix.lower() == ".png":
        try:
            with Image.open(path) as img:
                gray = img.convert("L")
                values = np.asarray(gray, dtype=np.float64) / 255.0
        except (UnidentifiedImageError, OSError) as exc:
            raise InputFormatError(f"unreadable saliency PNG {path}: {exc}") from exc
        return SaliencyMap(values)
    if path.suffix.lower() == ".csv":
        rows = []
        with open(path, newline="") as fh:
            for lineno, line in enumerate(csv.reader(fh), start=1):
                if not line:
                    continue
                try:
                    rows.append([float(v) for v in line])
                except ValueError as exc:
                    raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
        if not rows:
            raise InputFormatError(f"empty saliency CSV {path}")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InputFormatError(f"ragged saliency CSV {path}")
        values = np.asarray(rows, dtype=np.float64)
        if values.min() < 0.0 or values.max() > 1.0:
            raise InputFormatError(f"saliency CSV {path} has values outside [0, 1]")
        return SaliencyMap(values)
    raise InputFormatError(f"unsupported saliency map format: {path}")


def write_saliency_map(saliency: SaliencyMap, path) -> None:
    """Store a map as 8-bit grayscale PNG (values scaled by 255, half-up)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    scaled = np.floor(saliency.values * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(scaled, mode="L").save(path, format="PNG")


def _format_float(value: float) -> str:
    return repr(float(value))


def write_trajectory(traj: CropTrajectory, path) -> None:
    """JSON-lines: a header object, then one object per sampled index."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        json.dumps(
            {
                "video_id": traj.video_id,
                "src_width": traj.src_width,
                "src_height": traj.src_height,
                "strategy": traj.strategy,
                "fallback": traj.fallback,
            },
            sort_keys=True,
        )
    ]
    for index, rect in traj.rects:
        lines.append(
            json.dumps(
                {"frame_index": index, "x": rect.x, "y": rect.y, "w": rect.w, "h": rect.h},
                sort_keys=True,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_trajectory(path) -> CropTrajectory:
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"trajectory file not found: {path}")
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if len(lines) < 2:
        raise InputFormatError(f"trajectory file {path} needs a header and at least one rect")
    try:
        header = json.loads(lines[0])
        rows = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"malformed JSON in trajectory {path}: {exc}") from exc
    try:
        rects = tuple(
            (int(row["frame_index"]), CropRect(int(row["x"]), int(row["y"]), int(row["w"]), int(row["h"])))
            for row in rows
        )
        return CropTrajectory(
            video_id=str(header["video_id"]),
            src_width=int(header["src_width"]),
            src_height=int(header["src_height"]),
            rects=rects,
            strategy=str(header.get("strategy", "")),
            fallback=bool(header.get("fallback", False)),
        )
    except KeyError as exc:
        raise InputFormatError(f"trajectory {path} is missing field {exc}") from exc
    except InvalidArgumentError as exc:
        raise InputFormatError(f"trajectory {path} violates invariants: {exc}") from exc


def write_video_scores_csv(scores, path) -> None:
    """``video_id,score`` rows; ``scores`` is an iterable of (id, value)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["video_id", "score"])
        for video_id, value in scores:
            writer.writerow([video_id, _format_float(value)])


def read_video_scores_csv(path) -> dict[str, float]:
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"scores CSV not found: {path}")
    out: dict[str, float] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["video_id", "score"]:
            raise InputFormatError(f"{path} must start with header 'video_id,score'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise InputFormatError(f"{path}:{lineno}: expected 2 columns")
            try:
                out[row[0]] = float(row[1])
            except ValueError as exc:
                raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_frame_scores_csv(rows, path) -> None:
    """``video_id,frame_index,score`` rows from (id, index, value) triples."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["video_id", "frame_index", "score"])
        for video_id, frame_index, value in rows:
            writer.writerow([video_id, int(frame_index), _format_float(value)])


def write_evaluation_csv(records, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["video_id", "score_before", "score_after"])
        for rec in records:
            writer.writerow(
                [rec.video_id, _format_float(rec.score_before), _format_float(rec.score_after)]
            )


def read_evaluation_csv(path) -> list[EvaluationRecord]:
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"evaluation CSV not found: {path}")
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["video_id", "score_before", "score_after"]
        if header is None or [c.strip() for c in header] != expected:
            raise InputFormatError(
                f"{path} must start with header 'video_id,score_before,score_after'"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise InputFormatError(f"{path}:{lineno}: expected 3 columns")
            try:
                records.append(EvaluationRecord(row[0], float(row[1]), float(row[2])))
            except (ValueError, InvalidArgumentError) as exc:
                raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
    return records


def write_partition_csv(partition: tuple[int, int, int], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["improved", "decreased", "unchanged"])
        writer.writerow(list(partition))


def write_threshold_table_csv(rows: list[ThresholdRow], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["threshold", "improved_fraction", "population"])
        for row in rows:
            writer.writerow(
                [_format_float(row.threshold), _format_float(row.improved_fraction), row.population]
            )


def write_curve_csv(curves: dict[str, list[float]], path) -> None:
    """Aligned curves as columns: step index plus one column per curve."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = list(curves)
    if not labels:
        raise InvalidArgumentError("need at least one curve")
    length = len(curves[labels[0]])
    if any(len(curves[lbl]) != length for lbl in labels):
        raise InvalidArgumentError("curves must have equal lengths")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step"] + labels)
        for i in range(length):
            writer.writerow([i] + [_format_float(curves[lbl][i]) for lbl in labels])


def write_range_summary_csv(rows: list[RangeSummaryRow], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["group", "p05", "p95", "median"])
        for row in rows:
            writer.writerow(
                [row.group, _format_float(row.p05), _format_float(row.p95), _format_float(row.median)]
            )
