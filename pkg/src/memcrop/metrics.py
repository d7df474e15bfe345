"""Before/after evaluation metrics for cropping experiments.

Given per-video scores before and after cropping, this module computes the
improved/decreased/unchanged partition, the share of improved videos above
each initial-score threshold, the cumulative mean of score deltas over videos
ordered by ascending original score (with interquartile outlier removal), and
per-group 90% score ranges.

Quartiles and percentiles use linear interpolation of order statistics
throughout, so every number here is reproducible by hand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

_DELTA_TOLERANCE = 1e-12

#: Initial-score thresholds reported by default in the improvement table.
DEFAULT_THRESHOLDS = (0.70, 0.75, 0.80, 0.85, 0.90, 0.95)


@dataclass(frozen=True)
class EvaluationRecord:
    """One video's score before and after cropping; delta = after - before."""

    video_id: str
    score_before: float
    score_after: float
    delta: float | None = None  # computed from the scores when omitted

    def __post_init__(self):
        for name in ("score_before", "score_after"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise InvalidArgumentError(f"{name} must be in [0, 1], got {v}")
        expected = self.score_after - self.score_before
        if self.delta is None:
            object.__setattr__(self, "delta", expected)
        elif abs(self.delta - expected) > _DELTA_TOLERANCE:
            raise InvalidArgumentError(
                f"delta {self.delta} does not equal score_after - score_before {expected}"
            )


@dataclass(frozen=True)
class ScoreSeries:
    """An ordered series of values with its ordering key recorded."""

    values: tuple[float, ...]
    order_key: str = "score_before_asc"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise InvalidArgumentError("score series must be nonempty")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ThresholdRow:
    threshold: float
    improved_fraction: float
    population: int


@dataclass(frozen=True)
class RangeSummaryRow:
    group: object
    p05: float
    p95: float
    median: float


@dataclass(frozen=True)
class PairedCurves:
    """Aligned cumulative-mean curves for a fixed vs variable comparison."""

    fixed: tuple[float, ...]
    variable: tuple[float, ...]


def improvement_partition(records) -> tuple[int, int, int]:
    """Counts of videos whose score improved, decreased, and stayed equal."""
    improved = decreased = unchanged = 0
    for rec in records:
        if rec.delta > 0:
            improved += 1
        elif rec.delta < 0:
            decreased += 1
        else:
            unchanged += 1
    return improved, decreased, unchanged


def threshold_table(records, thresholds=DEFAULT_THRESHOLDS) -> list[ThresholdRow]:
    """Fraction of improved videos among those starting at or above each
    threshold. Empty populations report fraction 0."""
    records = list(records)
    thresholds = [float(t) for t in thresholds]
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise InvalidArgumentError("thresholds must be sorted ascending")
    rows = []
    for t in thresholds:
        population = [r for r in records if r.score_before >= t]
        improved = sum(1 for r in population if r.delta > 0)
        fraction = improved / len(population) if population else 0.0
        rows.append(ThresholdRow(threshold=t, improved_fraction=fraction, population=len(population)))
    return rows


def cumulative_mean(series: ScoreSeries) -> list[float]:
    """Running mean: output[i] is the mean of the first i+1 values."""
    out = []
    total = 0.0
    for i, v in enumerate(series.values):
        total += v
        out.append(total / (i + 1))
    return out


def _quartile_bounds(values: np.ndarray) -> tuple[float, float]:
    q1 = float(np.percentile(values, 25))
    q3 = float(np.percentile(values, 75))
    iqr = q3 - q1
    return q1 - 1.5 * iqr, q3 + 1.5 * iqr


def iqr_filter(values) -> list[float]:
    """Drop values outside [Q1 - 1.5*IQR, Q3 + 1.5*IQR], preserving order."""
    values = [float(v) for v in values]
    if len(values) < 4:
        raise InvalidArgumentError("interquartile filtering needs at least 4 values")
    lo, hi = _quartile_bounds(np.asarray(values))
    return [v for v in values if lo <= v <= hi]


def range_summary(groups) -> list[RangeSummaryRow]:
    """5th/95th percentile and median of each group's after-cropping scores.

    ``groups`` maps a group key (e.g. the crop fraction) to that group's
    scores; output rows keep the input group order.
    """
    rows = []
    for group, scores in groups.items():
        scores = np.asarray([float(s) for s in scores])
        if scores.size == 0:
            raise InvalidArgumentError(f"group {group!r} has no scores")
        rows.append(
            RangeSummaryRow(
                group=group,
                p05=float(np.percentile(scores, 5)),
                p95=float(np.percentile(scores, 95)),
                median=float(np.percentile(scores, 50)),
            )
        )
    return rows


def compare_runs(series_fixed: ScoreSeries, series_variable: ScoreSeries) -> PairedCurves:
    """Cumulative-mean curves of two delta series over the same videos.

    Outlier bounds are computed per series; a position flagged in either
    series is dropped from both so the emitted curves stay aligned step for
    step.
    """
    if len(series_fixed) != len(series_variable):
        raise InvalidArgumentError(
            f"series lengths differ: {len(series_fixed)} vs {len(series_variable)}"
        )
    if series_fixed.order_key != series_variable.order_key:
        raise InvalidArgumentError(
            f"series ordering keys differ: {series_fixed.order_key!r} "
            f"vs {series_variable.order_key!r}"
        )
    if len(series_fixed) < 4:
        raise InvalidArgumentError("interquartile filtering needs at least 4 values")
    fixed = np.asarray(series_fixed.values)
    variable = np.asarray(series_variable.values)
    lo_f, hi_f = _quartile_bounds(fixed)
    lo_v, hi_v = _quartile_bounds(variable)
    keep = (fixed >= lo_f) & (fixed <= hi_f) & (variable >= lo_v) & (variable <= hi_v)
    if not keep.any():
        raise InvalidArgumentError("outlier filtering removed every value")
    kept_fixed = ScoreSeries(tuple(fixed[keep]), series_fixed.order_key)
    kept_variable = ScoreSeries(tuple(variable[keep]), series_variable.order_key)
    return PairedCurves(
        fixed=tuple(cumulative_mean(kept_fixed)),
        variable=tuple(cumulative_mean(kept_variable)),
    )


def delta_series(records) -> ScoreSeries:
    """Score deltas ordered by ascending original score (ties by video id)."""
    ordered = sorted(records, key=lambda r: (r.score_before, r.video_id))
    if not ordered:
        raise InvalidArgumentError("need at least one record")
    return ScoreSeries(tuple(r.delta for r in ordered), "score_before_asc")
