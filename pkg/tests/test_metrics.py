import math

import pytest

from shapebench.assign import Assignment, match_by_edit_distance
from shapebench.metrics import (
    DISCRETE_ATTRIBUTES,
    EmptyGroundTruth,
    NoMatchedPairs,
    count_rmse,
    freq_pr,
    rmse_matched,
    sama_dataset,
    sama_sample,
)
from shapebench.scene import ColorName, QuadrantLabel, ShapeKind
from shapebench.textio import NA, ParsedShape


def record(**overrides):
    base = dict(
        shape=ShapeKind.CIRCLE,
        color=ColorName.RED,
        quadrant=QuadrantLabel.SECOND,
        center=(56, 56),
        relative_position="none",
        rotation_deg=0,
        occluded=False,
    )
    base.update(overrides)
    return ParsedShape(**base)


def identity_assignment(n):
    return Assignment(
        pairs=tuple((i, i) for i in range(n)),
        unmatched_rows=(), unmatched_cols=(), total_cost=0.0,
    )


class TestSamaSample:
    def test_perfect(self):
        gt = [record(), record(color=ColorName.BLUE), record(center=(9, 9))]
        assert sama_sample(gt, list(gt), identity_assignment(3)) == 1.0

    def test_one_wrong_color(self):
        gt = [record(), record(color=ColorName.BLUE, center=(150, 150))]
        pred = [record(), record(color=ColorName.GREEN, center=(150, 150))]
        score = sama_sample(gt, pred, identity_assignment(2))
        assert score == pytest.approx(0.9)

    def test_missing_prediction(self):
        gt = [record(), record(color=ColorName.BLUE)]
        pred = [record()]
        asg = Assignment(pairs=((0, 0),), unmatched_rows=(1,),
                         unmatched_cols=(), total_cost=0.0)
        assert sama_sample(gt, pred, asg) == pytest.approx(0.5)

    def test_na_never_matches(self):
        gt = [record()]
        pred = [record(shape=NA, color=NA, quadrant=NA,
                       relative_position=NA, occluded=NA)]
        assert sama_sample(gt, pred, identity_assignment(1)) == 0.0

    def test_empty_gt(self):
        with pytest.raises(EmptyGroundTruth):
            sama_sample([], [], identity_assignment(0))

    def test_surplus_prediction_cannot_increase(self):
        gt = [record(), record(color=ColorName.BLUE, center=(150, 150))]
        perfect = sama_sample(gt, list(gt), identity_assignment(2))
        extra = list(gt) + [record(color=ColorName.YELLOW)]
        asg = Assignment(pairs=((0, 0), (1, 1)), unmatched_rows=(),
                         unmatched_cols=(2,), total_cost=0.0)
        assert sama_sample(gt, extra, asg) <= perfect


class TestSamaDataset:
    def test_all_perfect(self):
        gt = [record(), record(color=ColorName.BLUE)]
        samples = [(gt, list(gt), identity_assignment(2))] * 4
        result = sama_dataset(samples)
        assert result.mean_accuracy == 1.0
        assert all(v == 1.0 for v in result.per_attribute_accuracy.values())

    def test_half_perfect_half_zero(self):
        gt = [record()]
        bad = [record(shape=NA, color=NA, quadrant=NA,
                      relative_position=NA, occluded=NA)]
        samples = [
            (gt, list(gt), identity_assignment(1)),
            (gt, bad, identity_assignment(1)),
        ]
        assert sama_dataset(samples).mean_accuracy == 0.5

    def test_one_corrupted_attribute_per_two_shape_sample(self):
        gt = [record(), record(color=ColorName.BLUE, center=(150, 150))]
        pred = [record(), record(color=ColorName.GREEN, center=(150, 150))]
        samples = [(gt, pred, identity_assignment(2))] * 10
        assert sama_dataset(samples).mean_accuracy == pytest.approx(0.9)


class TestFreqPr:
    def test_worked_example(self):
        gt = [ShapeKind.CIRCLE, ShapeKind.CIRCLE, ShapeKind.TRIANGLE]
        pt = [ShapeKind.SQUARE, ShapeKind.TRIANGLE, ShapeKind.CIRCLE]
        res = freq_pr(gt, pt)
        assert res.total_correct == 2
        assert res.true_total == 3 and res.pred_total == 3
        assert res.precision == pytest.approx(2 / 3, abs=1e-12)
        assert res.recall == pytest.approx(2 / 3, abs=1e-12)

    def test_empty_predictions(self):
        res = freq_pr([ShapeKind.CIRCLE], [])
        assert res.precision == 0.0 and res.recall == 0.0 and res.f1 == 0.0

    def test_identical(self):
        vals = [ShapeKind.CIRCLE, ShapeKind.SQUARE]
        res = freq_pr(vals, list(reversed(vals)))
        assert res.precision == res.recall == res.f1 == 1.0

    def test_na_excluded(self):
        res = freq_pr([ShapeKind.CIRCLE, NA], [NA, NA, ShapeKind.CIRCLE])
        assert res.true_total == 1 and res.pred_total == 1
        assert res.precision == res.recall == 1.0

    def test_permutation_invariance(self):
        gt = [ShapeKind.CIRCLE, ShapeKind.SQUARE, ShapeKind.SQUARE]
        pt = [ShapeKind.SQUARE, ShapeKind.CIRCLE, ShapeKind.CIRCLE]
        a = freq_pr(gt, pt)
        b = freq_pr(list(reversed(gt)), list(reversed(pt)))
        assert (a.precision, a.recall) == (b.precision, b.recall)

    def test_equal_cardinality_precision_equals_recall(self):
        gt = [ShapeKind.CIRCLE, ShapeKind.SQUARE, ShapeKind.ELLIPSE]
        pt = [ShapeKind.SQUARE, ShapeKind.SQUARE, ShapeKind.SQUARE]
        res = freq_pr(gt, pt)
        assert res.precision == res.recall


class TestRmse:
    def test_perfect(self):
        gt = [record(), record(center=(10, 20))]
        value, skipped = rmse_matched(gt, list(gt), identity_assignment(2),
                                      "center")
        assert value == 0.0 and skipped == 0

    def test_center_hand_arithmetic(self):
        gt = [record(center=(100, 100))]
        pred = [record(center=(103, 104))]
        value, _ = rmse_matched(gt, pred, identity_assignment(1), "center")
        assert value == pytest.approx(5.0, abs=1e-12)

    def test_rotation_no_wrap(self):
        gt = [record(rotation_deg=30)]
        pred = [record(rotation_deg=0)]
        value, _ = rmse_matched(gt, pred, identity_assignment(1), "rotation")
        assert value == pytest.approx(30.0)

    def test_na_pairs_skipped(self):
        gt = [record(center=(100, 100)), record(center=(50, 50))]
        pred = [record(center=(103, 104)), record(center=NA)]
        value, skipped = rmse_matched(gt, pred, identity_assignment(2),
                                      "center")
        assert value == pytest.approx(5.0)
        assert skipped == 1

    def test_no_matched_pairs(self):
        gt = [record()]
        pred = [record(center=NA)]
        with pytest.raises(NoMatchedPairs):
            rmse_matched(gt, pred, identity_assignment(1), "center")

    def test_matching_normalizes_order(self):
        from shapebench.textio import OutputFormat, parse_shape
        gt = [record(center=(10, 10)), record(color=ColorName.BLUE,
                                              center=(200, 200))]
        gt_segs = ["red circle ten", "blue circle two hundred"]
        pred_segs = list(reversed(gt_segs))
        asg = match_by_edit_distance(gt_segs, pred_segs)
        value, _ = rmse_matched(gt, list(reversed(gt)), asg, "center")
        assert value == 0.0


class TestCountRmse:
    def test_identical(self):
        assert count_rmse([1, 2, 3], [1, 2, 3]) == 0.0

    def test_single(self):
        assert count_rmse([3], [5]) == pytest.approx(2.0)

    def test_hand_arithmetic(self):
        assert count_rmse([1, 2, 3], [2, 2, 1]) == pytest.approx(
            math.sqrt(5 / 3), abs=1e-9)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            count_rmse([1], [1, 2])
