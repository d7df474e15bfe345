"""Memorability scoring through a pluggable per-frame scorer contract.

A video's score is the arithmetic mean of its sampled frames' scores, each
in [0, 1]. Three scorers are built in:

* ``file_store`` - reads precomputed per-frame scores from a CSV
  (``video_id,frame_index,score``), the hook for external models.
* ``constant`` - a fixed value, for wiring tests.
* ``synthetic_contrast`` - population std of grayscale pixel values divided
  by the maximum possible (127.5). Deterministic and content-sensitive, so
  end-to-end tests can observe crop-induced score changes.

Backends returning values outside [0, 1] are a hard error, never clamped:
silent clamping would hide data corruption.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BackendError, InputFormatError, InvalidArgumentError, MissingScoreError
from .frames import Frame, FrameSequence, sample_frame_indices

SCORER_KINDS = ("file_store", "constant", "synthetic_contrast")

#: Largest possible population std of 8-bit values (half 0, half 255).
_MAX_GRAY_STD = 127.5


@dataclass(frozen=True)
class MemorabilityScore:
    value: float

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise InvalidArgumentError(f"memorability score must be in [0, 1], got {self.value}")


@dataclass(frozen=True)
class ScorerConfig:
    """Which scorer to use; ``path`` feeds file_store, ``value`` constant."""

    kind: str = "synthetic_contrast"
    path: str | None = None
    value: float = 0.5

    def __post_init__(self):
        if self.kind not in SCORER_KINDS:
            raise InvalidArgumentError(
                f"unknown scorer {self.kind!r}, expected one of {SCORER_KINDS}"
            )
        if self.kind == "file_store" and not self.path:
            raise InvalidArgumentError("file_store scorer needs a CSV path")
        if self.kind == "constant" and not (0.0 <= self.value <= 1.0):
            raise InvalidArgumentError("constant scorer value must be in [0, 1]")


class ConstantScorer:
    def __init__(self, value: float):
        self.value = float(value)

    def score(self, frame: Frame, video_id: str, frame_index: int) -> float:
        return self.value


class ContrastScorer:
    """Normalized grayscale contrast: std(luma) / 127.5.

    A flat frame scores 0.0; a half-black half-white frame scores 1.0.
    """

    def score(self, frame: Frame, video_id: str, frame_index: int) -> float:
        px = frame.pixels.astype(np.float64)
        luma = (299.0 * px[:, :, 0] + 587.0 * px[:, :, 1] + 114.0 * px[:, :, 2]) / 1000.0
        # min() only absorbs float dust; the exact value cannot exceed 1.
        return min(float(luma.std()) / _MAX_GRAY_STD, 1.0)


class FileStoreScorer:
    """Immutable lookup table loaded once from a per-frame scores CSV."""

    def __init__(self, path: str):
        self.path = str(path)
        self.table = _read_frame_scores_csv(path)

    def score(self, frame: Frame, video_id: str, frame_index: int) -> float:
        key = (video_id, frame_index)
        if key not in self.table:
            raise MissingScoreError(
                f"no score for video {video_id!r} frame {frame_index} in {self.path}"
            )
        return self.table[key]


def _read_frame_scores_csv(path: str) -> dict[tuple[str, int], float]:
    p = Path(path)
    if not p.exists():
        raise InputFormatError(f"scores CSV not found: {path}")
    table: dict[tuple[str, int], float] = {}
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["video_id", "frame_index", "score"]:
            raise InputFormatError(
                f"scores CSV {path} must start with header 'video_id,frame_index,score'"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise InputFormatError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            try:
                frame_index = int(row[1])
                score = float(row[2])
            except ValueError as exc:
                raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
            if not (0.0 <= score <= 1.0):
                raise BackendError(
                    f"{path}:{lineno}: score {score} outside [0, 1] for "
                    f"video {row[0]!r} frame {frame_index}"
                )
            table[(row[0], frame_index)] = score
    return table


def build_scorer(config: ScorerConfig):
    """Instantiate the configured scorer; file stores load their CSV here."""
    if config.kind == "constant":
        return ConstantScorer(config.value)
    if config.kind == "synthetic_contrast":
        return ContrastScorer()
    return FileStoreScorer(config.path)


def score_frame(frame: Frame, scorer, video_id: str = "", frame_index: int = 0) -> MemorabilityScore:
    """Score one frame; accepts a ScorerConfig or an already-built scorer."""
    if isinstance(scorer, ScorerConfig):
        scorer = build_scorer(scorer)
    value = scorer.score(frame, video_id, frame_index)
    if not (0.0 <= value <= 1.0):
        raise BackendError(
            f"scorer returned {value} outside [0, 1] for video {video_id!r} frame {frame_index}"
        )
    return MemorabilityScore(float(value))


def score_video(
    seq: FrameSequence, scorer, stride: int = 10, offset: int = 0
) -> MemorabilityScore:
    """Mean of the sampled frames' scores."""
    if isinstance(scorer, ScorerConfig):
        scorer = build_scorer(scorer)
    indices = sample_frame_indices(len(seq), stride, offset)
    total = 0.0
    for idx in indices:
        total += score_frame(seq[idx], scorer, seq.video_id, idx).value
    return MemorabilityScore(total / len(indices))
