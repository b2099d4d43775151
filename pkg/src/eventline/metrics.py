"""Temporal grounding and highlight detection metrics.

Grounding: mean IoU between the predicted window and ground truth, plus
Recall@1 at IoU thresholds. Highlight detection: mAP over ranked windows
(greedy matching, IoU thresholds 0.50:0.05:0.95, uninterpolated all-points
AP) and HIT@1 (does the top-ranked window align with any ground-truth
window at IoU >= tau).

All aggregates use math.fsum, so results are independent of sample order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EmptyInputError, NoGroundTruthError, SchemaViolationError
from .timeline import Interval

DEFAULT_RECALL_THRESHOLDS = (0.3, 0.5, 0.7)
AP_IOU_THRESHOLDS = tuple(k / 100 for k in range(50, 100, 5))
DEFAULT_HIT_IOU = 0.5


def iou(a: Interval, b: Interval) -> float:
    """Intersection-over-union of two time windows, in [0, 1].

    Symmetric; 1.0 iff the windows are identical, 0.0 when disjoint.
    Callers supply valid (start < end) intervals.
    """
    inter = min(a.end, b.end) - max(a.start, b.start)
    if inter <= 0.0:
        return 0.0
    union = (a.end - a.start) + (b.end - b.start) - inter
    if union <= 0.0:
        return 0.0
    return inter / union


@dataclass(frozen=True)
class GroundingSample:
    """One query: the model's single predicted window vs ground truth."""

    query_id: str
    prediction: Interval
    ground_truth: Interval


@dataclass(frozen=True)
class ScoredWindow:
    interval: Interval
    score: float


@dataclass(frozen=True)
class HighlightSample:
    """One query: ranked candidate windows vs the ground-truth window set.

    Predictions are normalized to descending score; ties break by earlier
    start, then input order, so rankings (and therefore mAP) are reproducible.
    """

    query_id: str
    predictions: tuple[ScoredWindow, ...]
    ground_truth: tuple[Interval, ...]

    def __post_init__(self):
        ranked = sorted(
            enumerate(self.predictions),
            key=lambda item: (-item[1].score, item[1].interval.start, item[0]),
        )
        object.__setattr__(self, "predictions", tuple(w for _, w in ranked))
        object.__setattr__(self, "ground_truth", tuple(self.ground_truth))


@dataclass(frozen=True)
class EvalSummary:
    """Aggregate metrics; grounding and highlight runs fill their own half."""

    n_samples: int
    miou: float | None = None
    recall_at: dict[float, float] | None = None
    mean_ap: float | None = None
    hit_at_1: float | None = None
    protocol: str = ""

    def __post_init__(self):
        for name, value in (("miou", self.miou), ("mean_ap", self.mean_ap), ("hit_at_1", self.hit_at_1)):
            if value is not None and not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} out of [0,1]: {value}")
        if self.recall_at:
            for tau, frac in self.recall_at.items():
                if not (0.0 <= frac <= 1.0):
                    raise ValueError(f"recall@{tau} out of [0,1]: {frac}")

    def to_json(self) -> dict:
        out: dict = {"n_samples": self.n_samples, "protocol": self.protocol}
        if self.miou is not None:
            out["miou"] = self.miou
        if self.recall_at is not None:
            out["recall_at"] = {f"{tau:g}": frac for tau, frac in sorted(self.recall_at.items())}
        if self.mean_ap is not None:
            out["map"] = self.mean_ap
        if self.hit_at_1 is not None:
            out["hit_at_1"] = self.hit_at_1
        return out


def grounding_eval(
    samples: list[GroundingSample] | tuple[GroundingSample, ...],
    thresholds: tuple[float, ...] = DEFAULT_RECALL_THRESHOLDS,
) -> EvalSummary:
    """mIoU and Recall@1 at each IoU threshold over a query set."""
    if not samples:
        raise EmptyInputError("grounding_eval needs at least one sample")
    ious = [iou(s.prediction, s.ground_truth) for s in samples]
    n = len(ious)
    recall = {tau: sum(1 for x in ious if x >= tau) / n for tau in sorted(thresholds)}
    return EvalSummary(
        n_samples=n,
        miou=math.fsum(ious) / n,
        recall_at=recall,
        protocol="grounding:top1-iou",
    )


def _greedy_hit_ranks(sample: HighlightSample, threshold: float) -> list[int]:
    """Ranks (1-based) whose prediction matched a ground-truth window.

    Predictions are walked in rank order; each claims the unmatched GT window
    with the highest IoU, provided it reaches the threshold. Ties go to the
    earliest GT index.
    """
    matched: set[int] = set()
    hits: list[int] = []
    for rank, pred in enumerate(sample.predictions, start=1):
        best_j = -1
        best = 0.0
        for j, gt in enumerate(sample.ground_truth):
            if j in matched:
                continue
            value = iou(pred.interval, gt)
            if value >= threshold and value > best:
                best = value
                best_j = j
        if best_j >= 0:
            matched.add(best_j)
            hits.append(rank)
    return hits


def average_precision(sample: HighlightSample, iou_threshold: float) -> float:
    """Uninterpolated all-points AP for one query at one IoU threshold."""
    if not sample.ground_truth:
        raise NoGroundTruthError(f"query {sample.query_id} has no ground-truth windows")
    if not sample.predictions:
        return 0.0
    hits = _greedy_hit_ranks(sample, iou_threshold)
    return math.fsum((k + 1) / rank for k, rank in enumerate(hits)) / len(sample.ground_truth)


def hit_at_1(sample: HighlightSample, hit_iou: float = DEFAULT_HIT_IOU) -> bool:
    """Does the top-ranked window reach IoU >= hit_iou against any GT window?

    Alignment always requires positive overlap, so hit_iou=0 counts any
    overlapping top-1 window and never a disjoint one.
    """
    if not sample.predictions or not sample.ground_truth:
        return False
    top = sample.predictions[0].interval
    best = max(iou(top, gt) for gt in sample.ground_truth)
    return best > 0.0 and best >= hit_iou


def highlight_eval(
    samples: list[HighlightSample] | tuple[HighlightSample, ...],
    ap_thresholds: tuple[float, ...] = AP_IOU_THRESHOLDS,
    hit_iou: float = DEFAULT_HIT_IOU,
) -> EvalSummary:
    """mAP (mean over samples of mean-over-thresholds AP) and HIT@1."""
    if not samples:
        raise EmptyInputError("highlight_eval needs at least one sample")
    per_sample_ap = [
        math.fsum(average_precision(s, tau) for tau in ap_thresholds) / len(ap_thresholds)
        for s in samples
    ]
    n = len(samples)
    taus = ",".join(f"{t:g}" for t in ap_thresholds)
    return EvalSummary(
        n_samples=n,
        mean_ap=math.fsum(per_sample_ap) / n,
        hit_at_1=sum(1 for s in samples if hit_at_1(s, hit_iou)) / n,
        protocol=f"highlight:greedy-match;ap@[{taus}];hit@{hit_iou:g}",
    )


# --- JSONL wire formats -------------------------------------------------------
# predictions: {"query_id": str, "windows": [{"start": n, "end": n, "score": n}]}
# ground truth mirrors it without scores.


def _window_from_json(obj: dict, *, scored: bool) -> tuple[Interval, float]:
    try:
        interval = Interval(float(obj["start"]), float(obj["end"]))
        score = float(obj["score"]) if scored else 0.0
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolationError(f"bad window object: {exc}") from exc
    if not interval.valid:
        raise SchemaViolationError(f"window must satisfy start < end: {obj}")
    return interval, score


def load_window_file(rows: list[dict], *, scored: bool) -> dict[str, list[tuple[Interval, float]]]:
    by_query: dict[str, list[tuple[Interval, float]]] = {}
    for obj in rows:
        try:
            query_id = str(obj["query_id"])
            windows = obj["windows"]
        except (KeyError, TypeError) as exc:
            raise SchemaViolationError(f"bad query object: {exc}") from exc
        if not isinstance(windows, list):
            raise SchemaViolationError(f"'windows' must be a list for query {query_id}")
        by_query.setdefault(query_id, []).extend(
            _window_from_json(w, scored=scored) for w in windows
        )
    return by_query


def grounding_samples_from_rows(pred_rows: list[dict], gt_rows: list[dict]) -> list[GroundingSample]:
    """Pair prediction and ground-truth files by query_id.

    The highest-scoring predicted window stands as the single prediction.
    Queries with ground truth but no prediction score as a zero-IoU sample
    (silence is penalized, matching the empty-prediction AP rule).
    """
    preds = load_window_file(pred_rows, scored=True)
    gts = load_window_file(gt_rows, scored=False)
    samples = []
    for query_id in gts:
        gt_windows = gts[query_id]
        if not gt_windows:
            raise SchemaViolationError(f"query {query_id} has no ground-truth window")
        gt = gt_windows[0][0]
        candidates = preds.get(query_id, [])
        if candidates:
            best = max(enumerate(candidates), key=lambda item: (item[1][1], -item[1][0].start, -item[0]))
            prediction = best[1][0]
        else:
            # Degenerate sliver far from any plausible GT: scores IoU 0.
            prediction = Interval(gt.end + 1.0, gt.end + 1.001)
        samples.append(GroundingSample(query_id=query_id, prediction=prediction, ground_truth=gt))
    return samples


def highlight_samples_from_rows(pred_rows: list[dict], gt_rows: list[dict]) -> list[HighlightSample]:
    preds = load_window_file(pred_rows, scored=True)
    gts = load_window_file(gt_rows, scored=False)
    samples = []
    for query_id in gts:
        gt_windows = tuple(w for w, _ in gts[query_id])
        if not gt_windows:
            raise SchemaViolationError(f"query {query_id} has no ground-truth window")
        windows = tuple(ScoredWindow(w, s) for w, s in preds.get(query_id, []))
        samples.append(
            HighlightSample(query_id=query_id, predictions=windows, ground_truth=gt_windows)
        )
    return samples
