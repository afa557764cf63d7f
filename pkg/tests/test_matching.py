"""Tests for greedy IoU matching."""
import numpy as np
import pytest

from neuromorph.core.masks import Instance
from neuromorph.core.matching import candidate_pairs, match_instances
from tests.helpers import rect_mask


def _strip(instance_id, length, width=5000):
    mask = np.zeros((1, width), dtype=bool)
    mask[0, :length] = True
    return Instance.from_mask(instance_id, mask)


def _rect(instance_id, x, y, w, h, size=32):
    return Instance.from_mask(instance_id, rect_mask(size, size, x, y, w, h))


class TestMatchInstances:
    def test_identical_sets(self):
        gt = [_rect(1, 0, 0, 5, 5), _rect(2, 10, 10, 4, 6), _rect(3, 20, 2, 3, 3)]
        result = match_instances(gt, gt)
        assert [(p.gt_id, p.pred_id, p.iou) for p in result.pairs] == [(1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)]
        assert result.unmatched_gt == [] and result.unmatched_pred == []

    def test_one_match_one_miss_one_spurious(self):
        a = _rect(1, 0, 0, 10, 10)
        b = _rect(2, 20, 20, 5, 5)
        a_pred = _rect(1, 0, 0, 10, 8)  # iou 0.8
        c_pred = _rect(2, 12, 0, 4, 4)
        result = match_instances([a, b], [a_pred, c_pred])
        assert [(p.gt_id, p.pred_id) for p in result.pairs] == [(1, 1)]
        assert result.pairs[0].iou == pytest.approx(0.8)
        assert result.unmatched_gt == [2]
        assert result.unmatched_pred == [2]
        assert (result.tp, result.fp, result.fn) == (1, 1, 1)

    def test_greedy_across_distinct_ground_truth(self):
        g1, g2 = _strip(1, 5000), _strip(2, 1650)
        p1, p2 = _strip(1, 3000), _strip(2, 858)
        edges = sorted((round(v, 6), g, p) for v, g, p in candidate_pairs([g1, g2], [p1, p2], 0.5))
        assert edges == [(0.52, 2, 2), (0.55, 2, 1), (0.6, 1, 1)]

        result = match_instances([g1, g2], [p1, p2], threshold=0.5)
        assert [(p.gt_id, p.pred_id) for p in result.pairs] == [(1, 1), (2, 2)]
        assert [p.iou for p in result.pairs] == pytest.approx([0.6, 0.52])

    def test_threshold_is_strict(self):
        gt = _rect(1, 0, 0, 4, 4)
        pred = _rect(1, 0, 0, 4, 2)  # iou exactly 0.5
        assert match_instances([gt], [pred], threshold=0.5).pairs == []
        assert len(match_instances([gt], [pred], threshold=0.49).pairs) == 1

    def test_tie_breaks_on_smaller_ids(self):
        gt = [_rect(2, 0, 0, 4, 4), _rect(1, 0, 0, 4, 4)]
        pred = [_rect(9, 0, 0, 4, 4), _rect(4, 0, 0, 4, 4)]
        result = match_instances(gt, pred, threshold=0.0)
        assert [(p.gt_id, p.pred_id) for p in result.pairs] == [(1, 4), (2, 9)]

    def test_result_independent_of_input_order(self):
        rng = np.random.default_rng(8)
        gt = [_rect(i, *(int(v) for v in rng.integers(0, 20, size=2)), 8, 8) for i in range(1, 7)]
        pred = [_rect(i, *(int(v) for v in rng.integers(0, 20, size=2)), 8, 8) for i in range(1, 7)]
        reference = match_instances(gt, pred, threshold=0.1)
        for _ in range(5):
            shuffled_gt = [gt[i] for i in rng.permutation(len(gt))]
            shuffled_pred = [pred[i] for i in rng.permutation(len(pred))]
            assert match_instances(shuffled_gt, shuffled_pred, threshold=0.1) == reference

    def test_raising_threshold_keeps_a_subset_of_pairs(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            gt = [_rect(i, *(int(v) for v in rng.integers(0, 24, size=2)), 6, 6) for i in range(1, 8)]
            pred = [
                _rect(i, *(int(v) for v in rng.integers(0, 24, size=2)), *(int(v) for v in rng.integers(3, 9, size=2)))
                for i in range(1, 8)
            ]
            previous = None
            for threshold in (0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95):
                pairs = {(p.gt_id, p.pred_id) for p in match_instances(gt, pred, threshold).pairs}
                if previous is not None:
                    assert pairs <= previous
                previous = pairs

    @pytest.mark.parametrize("threshold", [0.5, 0.7])
    def test_result_independent_of_input_order_above_half(self, threshold):
        rng = np.random.default_rng(11)
        for _ in range(20):
            gt = [_rect(i, *(int(v) for v in rng.integers(0, 24, size=2)), 6, 6) for i in range(1, 8)]
            pred = [
                _rect(i, *(int(v) for v in rng.integers(0, 24, size=2)), *(int(v) for v in rng.integers(4, 8, size=2)))
                for i in range(1, 8)
            ]
            reference = match_instances(gt, pred, threshold)
            shuffled_gt = [gt[i] for i in rng.permutation(len(gt))]
            shuffled_pred = [pred[i] for i in rng.permutation(len(pred))]
            assert match_instances(shuffled_gt, shuffled_pred, threshold) == reference

    def test_each_instance_used_once(self):
        rng = np.random.default_rng(9)
        gt = [_rect(i, *(int(v) for v in rng.integers(0, 24, size=2)), 6, 6) for i in range(1, 10)]
        pred = [_rect(i, *(int(v) for v in rng.integers(0, 24, size=2)), 6, 6) for i in range(1, 10)]
        result = match_instances(gt, pred, threshold=0.0)
        assert len({p.gt_id for p in result.pairs}) == result.tp
        assert len({p.pred_id for p in result.pairs}) == result.tp
        assert result.tp + result.fn == len(gt)
        assert result.tp + result.fp == len(pred)

    def test_empty_inputs(self):
        result = match_instances([], [_rect(1, 0, 0, 2, 2)])
        assert (result.tp, result.fp, result.fn) == (0, 1, 0)

    @pytest.mark.parametrize("threshold", [-0.1, 1.0, 1.5])
    def test_threshold_range(self, threshold):
        with pytest.raises(ValueError, match="threshold"):
            match_instances([], [], threshold=threshold)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimensions"):
            match_instances([_rect(1, 0, 0, 2, 2, size=8)], [_rect(1, 0, 0, 2, 2, size=9)])
