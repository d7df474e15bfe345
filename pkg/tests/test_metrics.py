import numpy as np
import pytest

from memcrop.errors import InvalidArgumentError
from memcrop.metrics import (
    EvaluationRecord,
    ScoreSeries,
    compare_runs,
    cumulative_mean,
    delta_series,
    improvement_partition,
    iqr_filter,
    range_summary,
    threshold_table,
)


def rec(video_id, before, after):
    return EvaluationRecord(video_id, before, after)


def test_record_delta_computed():
    r = rec("v", 0.4, 0.7)
    assert r.delta == pytest.approx(0.3, abs=1e-15)


def test_record_delta_validated():
    with pytest.raises(InvalidArgumentError):
        EvaluationRecord("v", 0.4, 0.7, delta=0.5)
    with pytest.raises(InvalidArgumentError):
        EvaluationRecord("v", -0.1, 0.5)


def test_partition_mixed_signs():
    records = [rec("a", 0.5, 0.6), rec("b", 0.5, 0.3), rec("c", 0.5, 0.5)]
    assert improvement_partition(records) == (1, 1, 1)


def test_partition_all_positive():
    records = [rec(str(i), 0.2, 0.4) for i in range(7)]
    assert improvement_partition(records) == (7, 0, 0)


def test_partition_counts_sum_to_n():
    rng = np.random.default_rng(31)
    for _ in range(200):
        n = int(rng.integers(0, 50))
        records = [
            rec(str(i), float(rng.uniform(0, 1)), float(rng.uniform(0, 1))) for i in range(n)
        ]
        parts = improvement_partition(records)
        assert sum(parts) == n


def test_threshold_table_hand_example():
    records = [rec("a", 0.6, 0.7), rec("b", 0.8, 0.9), rec("c", 0.95, 0.9)]
    rows = threshold_table(records, [0.7, 0.9])
    assert (rows[0].threshold, rows[0].improved_fraction, rows[0].population) == (0.7, 0.5, 2)
    assert (rows[1].threshold, rows[1].improved_fraction, rows[1].population) == (0.9, 0.0, 1)


def test_threshold_table_empty_population():
    rows = threshold_table([rec("a", 0.2, 0.3)], [0.9])
    assert rows[0].population == 0
    assert rows[0].improved_fraction == 0.0


def test_threshold_table_population_non_increasing():
    rng = np.random.default_rng(17)
    records = [rec(str(i), float(rng.uniform(0, 1)), float(rng.uniform(0, 1))) for i in range(60)]
    rows = threshold_table(records, [0.1, 0.3, 0.5, 0.7, 0.9])
    pops = [r.population for r in rows]
    assert pops == sorted(pops, reverse=True)
    assert all(0.0 <= r.improved_fraction <= 1.0 for r in rows)


def test_threshold_table_matches_brute_force():
    rng = np.random.default_rng(23)
    for _ in range(100):
        n = int(rng.integers(1, 40))
        records = [
            rec(str(i), float(rng.uniform(0, 1)), float(rng.uniform(0, 1))) for i in range(n)
        ]
        thresholds = sorted(float(t) for t in rng.uniform(0, 1, 4))
        rows = threshold_table(records, thresholds)
        for t, row in zip(thresholds, rows):
            pop = [r for r in records if r.score_before >= t]
            imp = [r for r in pop if r.delta > 0]
            assert row.population == len(pop)
            expected = len(imp) / len(pop) if pop else 0.0
            assert row.improved_fraction == pytest.approx(expected, abs=1e-15)


def test_threshold_table_requires_sorted():
    with pytest.raises(InvalidArgumentError):
        threshold_table([], [0.9, 0.7])


def test_cumulative_mean_single():
    assert cumulative_mean(ScoreSeries((2.0,))) == [2.0]


def test_cumulative_mean_three():
    assert cumulative_mean(ScoreSeries((1.0, 2.0, 3.0))) == [1.0, 1.5, 2.0]


def test_cumulative_mean_zeros():
    assert cumulative_mean(ScoreSeries((0.0,) * 5)) == [0.0] * 5


def test_cumulative_mean_matches_full_resum():
    rng = np.random.default_rng(41)
    for _ in range(300):
        n = int(rng.integers(1, 60))
        values = [float(v) for v in rng.normal(0, 1, n)]
        got = cumulative_mean(ScoreSeries(tuple(values)))
        for i in range(n):
            assert abs(got[i] - sum(values[: i + 1]) / (i + 1)) <= 1e-12


def test_iqr_filter_hand_example():
    assert iqr_filter([1, 2, 3, 4, 100]) == [1.0, 2.0, 3.0, 4.0]


def test_iqr_filter_tight_data_unchanged():
    values = [1.0, 1.1, 1.2, 1.3, 1.4]
    assert iqr_filter(values) == values


def test_iqr_filter_symmetric_outliers():
    values = [-500.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 500.0]
    assert iqr_filter(values) == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]


def test_iqr_filter_preserves_order():
    values = [4.0, 1.0, 100.0, 3.0, 2.0]
    assert iqr_filter(values) == [4.0, 1.0, 3.0, 2.0]


def test_iqr_filter_needs_four_values():
    with pytest.raises(InvalidArgumentError):
        iqr_filter([1.0, 2.0, 3.0])


def test_iqr_filter_conditionally_idempotent():
    # when the first pass removes nothing, the quartiles are unchanged and a
    # second pass is a no-op (full idempotence is not claimed)
    values = [1.0, 2.0, 3.0, 4.0, 5.0]
    once = iqr_filter(values)
    assert once == values
    assert iqr_filter(once) == once


def test_range_summary_identical_scores():
    rows = range_summary({0.5: [0.7, 0.7, 0.7]})
    assert (rows[0].p05, rows[0].p95, rows[0].median) == (0.7, 0.7, 0.7)


def test_range_summary_uniform_grid():
    rows = range_summary({0.3: [float(i) for i in range(101)]})
    assert (rows[0].p05, rows[0].p95, rows[0].median) == (5.0, 95.0, 50.0)


def test_range_summary_keeps_group_order():
    rows = range_summary({0.9: [0.5], 0.1: [0.2]})
    assert [r.group for r in rows] == [0.9, 0.1]
    assert all(r.p05 <= r.median <= r.p95 for r in rows)


def test_compare_runs_identical_series():
    s = ScoreSeries(tuple(float(v) for v in np.random.default_rng(2).normal(0, 0.1, 30)))
    curves = compare_runs(s, s)
    assert curves.fixed == curves.variable


def test_compare_runs_shifted_series_dominates():
    rng = np.random.default_rng(3)
    base = [float(v) for v in rng.normal(0, 0.05, 40)]
    eps = 0.01
    fixed = ScoreSeries(tuple(base))
    variable = ScoreSeries(tuple(v + eps for v in base))
    curves = compare_runs(fixed, variable)
    assert len(curves.fixed) == len(curves.variable)
    assert all(v >= f for f, v in zip(curves.fixed, curves.variable))


def test_compare_runs_decreasing_curve_shape():
    # positive deltas concentrated at low original scores -> the running mean
    # starts high and drifts down
    n = 60
    deltas = [0.2 - 0.4 * i / (n - 1) for i in range(n)]
    s = ScoreSeries(tuple(deltas))
    curves = compare_runs(s, s)
    assert curves.fixed[0] > curves.fixed[-1]
    diffs = [b - a for a, b in zip(curves.fixed, curves.fixed[1:])]
    assert all(d <= 1e-12 for d in diffs)


def test_compare_runs_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        compare_runs(ScoreSeries((1.0, 2.0, 3.0, 4.0)), ScoreSeries((1.0, 2.0, 3.0, 4.0, 5.0)))


def test_compare_runs_order_key_mismatch():
    a = ScoreSeries((1.0, 2.0, 3.0, 4.0), "score_before_asc")
    b = ScoreSeries((1.0, 2.0, 3.0, 4.0), "video_id")
    with pytest.raises(InvalidArgumentError):
        compare_runs(a, b)


def test_delta_series_sorted_by_original_score():
    records = [rec("b", 0.8, 0.7), rec("a", 0.2, 0.5), rec("c", 0.5, 0.5)]
    series = delta_series(records)
    assert series.order_key == "score_before_asc"
    assert series.values == pytest.approx((0.3, 0.0, -0.1))
