import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eventline.errors import EmptyInputError, NoGroundTruthError
from eventline.metrics import (
    AP_IOU_THRESHOLDS,
    GroundingSample,
    HighlightSample,
    ScoredWindow,
    average_precision,
    grounding_eval,
    highlight_eval,
    hit_at_1,
    iou,
)
from eventline.timeline import Interval
from oracles import ap_oracle, grid_iou, grid_iou_masks


def hl(preds, gts, query_id="q"):
    return HighlightSample(
        query_id=query_id,
        predictions=tuple(ScoredWindow(Interval(s, e), score) for s, e, score in preds),
        ground_truth=tuple(Interval(s, e) for s, e in gts),
    )


# the [hit, miss, hit] fixture: two GT windows, matched IoUs are exactly 1.0
HIT_MISS_HIT = hl(
    preds=[(0, 10, 0.9), (40, 50, 0.5), (20, 30, 0.1)],
    gts=[(0, 10), (20, 30)],
)


class TestIou:
    def test_identity(self):
        assert iou(Interval(5, 10), Interval(5, 10)) == 1.0

    def test_disjoint(self):
        assert iou(Interval(0, 5), Interval(6, 10)) == 0.0

    def test_touching_is_zero(self):
        assert iou(Interval(0, 5), Interval(5, 10)) == 0.0

    def test_partial_matches_grid_oracle(self):
        value = iou(Interval(0, 10), Interval(5, 15))
        assert value == pytest.approx(grid_iou(0, 10, 5, 15), abs=1e-12)
        assert value == pytest.approx(0.3333, abs=5e-5)

    def test_random_pairs_match_oracle(self):
        rng = random.Random(17)
        for _ in range(2000):
            a0 = round(rng.uniform(0, 50), 2)
            a1 = a0 + round(rng.uniform(0.01, 60), 2)
            b0 = round(rng.uniform(0, 50), 2)
            b1 = b0 + round(rng.uniform(0.01, 60), 2)
            assert iou(Interval(a0, a1), Interval(b0, b1)) == pytest.approx(
                grid_iou(a0, a1, b0, b1), abs=1e-4
            )

    def test_grid_oracle_agrees_with_literal_masks(self):
        rng = random.Random(23)
        for _ in range(100):
            a0 = round(rng.uniform(0, 20), 2)
            a1 = a0 + round(rng.uniform(0.01, 20), 2)
            b0 = round(rng.uniform(0, 20), 2)
            b1 = b0 + round(rng.uniform(0.01, 20), 2)
            assert grid_iou(a0, a1, b0, b1) == pytest.approx(
                grid_iou_masks(a0, a1, b0, b1), abs=1e-12
            )

    @settings(max_examples=300, deadline=None)
    @given(
        a0=st.floats(0, 1000, allow_nan=False),
        alen=st.floats(0.001, 500, allow_nan=False),
        b0=st.floats(0, 1000, allow_nan=False),
        blen=st.floats(0.001, 500, allow_nan=False),
    )
    def test_symmetry_and_range(self, a0, alen, b0, blen):
        a, b = Interval(a0, a0 + alen), Interval(b0, b0 + blen)
        assert iou(a, b) == iou(b, a)
        assert 0.0 <= iou(a, b) <= 1.0
        assert iou(a, a) == 1.0


class TestGroundingEval:
    def test_exact_match_identities(self):
        samples = [
            GroundingSample(f"q{i}", Interval(i, i + 10), Interval(i, i + 10)) for i in range(5)
        ]
        summary = grounding_eval(samples)
        assert summary.miou == 1.0
        assert all(v == 1.0 for v in summary.recall_at.values())

    def test_hand_computed_fixture(self):
        # per-sample IoUs 0.6, 0.4, 0.8 against gt [0, 10]
        samples = [
            GroundingSample("a", Interval(0, 6), Interval(0, 10)),
            GroundingSample("b", Interval(0, 4), Interval(0, 10)),
            GroundingSample("c", Interval(0, 8), Interval(0, 10)),
        ]
        summary = grounding_eval(samples, thresholds=(0.3, 0.5, 0.7))
        assert summary.miou == pytest.approx(0.6, abs=1e-9)
        assert summary.recall_at[0.5] == pytest.approx(2 / 3, abs=1e-9)
        assert summary.recall_at[0.7] == pytest.approx(1 / 3, abs=1e-9)
        assert summary.recall_at[0.3] == 1.0

    def test_disjoint_prediction(self):
        summary = grounding_eval([GroundingSample("q", Interval(0, 5), Interval(6, 10))])
        assert summary.miou == 0.0
        assert all(v == 0.0 for v in summary.recall_at.values())

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            grounding_eval([])

    def test_recall_is_anti_monotone_in_threshold(self):
        rng = random.Random(5)
        samples = [
            GroundingSample(
                f"q{i}",
                Interval(rng.uniform(0, 50), rng.uniform(51, 100)),
                Interval(rng.uniform(0, 50), rng.uniform(51, 100)),
            )
            for i in range(40)
        ]
        taus = [i / 10 for i in range(1, 10)]
        summary = grounding_eval(samples, thresholds=tuple(taus))
        values = [summary.recall_at[t] for t in taus]
        assert values == sorted(values, reverse=True)

    def test_permutation_invariance(self):
        rng = random.Random(6)
        samples = [
            GroundingSample(
                f"q{i}",
                Interval(rng.uniform(0, 50), rng.uniform(51, 100)),
                Interval(rng.uniform(0, 50), rng.uniform(51, 100)),
            )
            for i in range(25)
        ]
        base = grounding_eval(samples)
        for _ in range(10):
            rng.shuffle(samples)
            shuffled = grounding_eval(samples)
            assert shuffled.miou == base.miou
            assert shuffled.recall_at == base.recall_at


class TestAveragePrecision:
    def test_exact_set_any_ranking_is_one(self):
        rng = random.Random(9)
        gts = [(0, 10), (20, 30), (40, 50)]
        for _ in range(10):
            order = gts[:]
            rng.shuffle(order)
            sample = hl([(s, e, rng.random()) for s, e in order], gts)
            for tau in AP_IOU_THRESHOLDS:
                assert average_precision(sample, tau) == 1.0

    def test_hit_miss_hit_fixture(self):
        expected = ap_oracle([(0, 10), (40, 50), (20, 30)], [(0, 10), (20, 30)], 0.5)
        value = average_precision(HIT_MISS_HIT, 0.5)
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx((1 / 1 + 2 / 3) / 2, abs=1e-9)

    def test_no_prediction_reaches_threshold(self):
        sample = hl([(100, 110, 0.9)], [(0, 10)])
        assert average_precision(sample, 0.5) == 0.0

    def test_empty_predictions_score_zero(self):
        assert average_precision(hl([], [(0, 10)]), 0.5) == 0.0

    def test_no_ground_truth(self):
        with pytest.raises(NoGroundTruthError):
            average_precision(hl([(0, 10, 1.0)], []), 0.5)

    def test_matches_enumeration_oracle_on_random_instances(self):
        rng = random.Random(31)
        for _ in range(1000):
            n_pred = rng.randint(0, 6)
            n_gt = rng.randint(1, 3)
            preds = []
            for _ in range(n_pred):
                s = round(rng.uniform(0, 90), 2)
                preds.append((s, s + round(rng.uniform(0.5, 20), 2)))
            gts = []
            for _ in range(n_gt):
                s = round(rng.uniform(0, 90), 2)
                gts.append((s, s + round(rng.uniform(0.5, 20), 2)))
            tau = rng.choice(AP_IOU_THRESHOLDS)
            # ranks descend by construction so library ranking == list order
            sample = hl([(s, e, 1.0 - k * 0.01) for k, (s, e) in enumerate(preds)], gts)
            assert average_precision(sample, tau) == pytest.approx(
                ap_oracle(preds, gts, tau), abs=1e-12
            )


class TestHighlightEval:
    def test_top1_exact_everywhere(self):
        samples = [hl([(0, 10, 0.9), (50, 60, 0.2)], [(0, 10)]) for _ in range(4)]
        summary = highlight_eval(samples)
        assert summary.hit_at_1 == 1.0
        assert summary.mean_ap > 0.0

    def test_low_iou_top1_is_a_miss(self):
        # top-1 IoU is 5/15 = 0.3333 < 0.5
        sample = hl([(5, 15, 0.9)], [(0, 10)])
        assert iou(Interval(5, 15), Interval(0, 10)) == pytest.approx(
            grid_iou(5, 15, 0, 10), abs=1e-12
        )
        summary = highlight_eval([sample])
        assert summary.hit_at_1 == 0.0

    def test_map_on_hit_miss_hit_fixture_across_thresholds(self):
        # every matched IoU is 1.0, so AP is the same at all ten thresholds
        summary = highlight_eval([HIT_MISS_HIT])
        assert summary.mean_ap == pytest.approx((1 / 1 + 2 / 3) / 2, abs=1e-9)

    def test_exact_match_identities(self):
        samples = [
            hl([(0, 10, 0.8), (20, 30, 0.6)], [(0, 10), (20, 30)], query_id=f"q{i}")
            for i in range(3)
        ]
        summary = highlight_eval(samples)
        assert summary.mean_ap == 1.0
        assert summary.hit_at_1 == 1.0

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            highlight_eval([])

    def test_hit_threshold_tightening_is_monotone(self):
        rng = random.Random(13)
        samples = []
        for i in range(30):
            gt_start = rng.uniform(0, 50)
            gt = (gt_start, gt_start + rng.uniform(5, 20))
            preds = [
                (gt[0] + rng.uniform(-5, 5), gt[1] + rng.uniform(-5, 5), rng.random())
                for _ in range(3)
            ]
            preds = [(s, e, score) for s, e, score in preds if e > s]
            samples.append(hl(preds or [(0, 1, 0.5)], [gt], query_id=f"q{i}"))
        previous = 1.0
        for tau in (0.0, 0.3, 0.5, 0.7, 0.9):
            current = highlight_eval(samples, hit_iou=tau).hit_at_1
            assert current <= previous + 1e-12
            previous = current

    def test_zero_hit_threshold_counts_any_overlap(self):
        sample = hl([(9.99, 30, 0.9)], [(0, 10)])
        assert highlight_eval([sample], hit_iou=0.0).hit_at_1 == 1.0
        assert not hit_at_1(hl([(20, 30, 0.9)], [(0, 10)]), 0.0)

    def test_tie_break_by_earlier_start(self):
        sample = hl([(20, 30, 0.5), (0, 10, 0.5)], [(0, 10)])
        assert sample.predictions[0].interval.start == 0
        assert highlight_eval([sample]).hit_at_1 == 1.0

    def test_permutation_invariance(self):
        rng = random.Random(21)
        samples = []
        for i in range(20):
            gts = [(rng.uniform(0, 40), rng.uniform(41, 80)) for _ in range(rng.randint(1, 3))]
            preds = [
                (rng.uniform(0, 40), rng.uniform(41, 80), rng.random())
                for _ in range(rng.randint(0, 5))
            ]
            samples.append(hl(preds, gts, query_id=f"q{i}"))
        base = highlight_eval(samples)
        for _ in range(10):
            rng.shuffle(samples)
            shuffled = highlight_eval(samples)
            assert shuffled.mean_ap == base.mean_ap
            assert shuffled.hit_at_1 == base.hit_at_1


def test_summary_json_shape():
    summary = highlight_eval([HIT_MISS_HIT])
    obj = summary.to_json()
    assert set(obj) == {"n_samples", "protocol", "map", "hit_at_1"}
    grounding = grounding_eval(
        [GroundingSample("q", Interval(0, 5), Interval(0, 5))], thresholds=(0.3, 0.5, 0.7)
    ).to_json()
    assert set(grounding) == {"n_samples", "protocol", "miou", "recall_at"}
    assert set(grounding["recall_at"]) == {"0.3", "0.5", "0.7"}


def test_ap_thresholds_are_the_ten_standard_ones():
    assert AP_IOU_THRESHOLDS == (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95)
    assert math.isclose(sum(AP_IOU_THRESHOLDS), 7.25)
