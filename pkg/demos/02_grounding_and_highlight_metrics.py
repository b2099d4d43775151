"""
Temporal grounding and highlight detection metrics
==================================================

Grounding scores a single predicted window per query (mIoU, Recall@1 at IoU
thresholds). Highlight detection scores a ranked list of windows per query
(mAP over IoU thresholds 0.50:0.05:0.95, plus HIT@1 for the top window).
"""

from eventline import (
    GroundingSample,
    HighlightSample,
    Interval,
    ScoredWindow,
    grounding_eval,
    highlight_eval,
    iou,
)

print("IoU of [0,10] and [5,15]:", round(iou(Interval(0, 10), Interval(5, 15)), 4))

# Three grounding queries with per-sample IoUs of 0.6, 0.4 and 0.8.
grounding = [
    GroundingSample("q1", prediction=Interval(0, 6), ground_truth=Interval(0, 10)),
    GroundingSample("q2", prediction=Interval(0, 4), ground_truth=Interval(0, 10)),
    GroundingSample("q3", prediction=Interval(0, 8), ground_truth=Interval(0, 10)),
]
summary = grounding_eval(grounding, thresholds=(0.3, 0.5, 0.7))
print("\ngrounding over 3 queries:")
print("  mIoU   :", round(summary.miou, 4))
for tau, frac in summary.recall_at.items():
    print(f"  R@1@{tau}:", round(frac, 4))

# One highlight query: two true windows, three ranked predictions. The
# middle-ranked prediction is a miss, so AP = (1/1 + 2/3) / 2.
highlight = HighlightSample(
    query_id="q-high",
    predictions=(
        ScoredWindow(Interval(0, 10), score=0.9),
        ScoredWindow(Interval(40, 50), score=0.5),
        ScoredWindow(Interval(20, 30), score=0.1),
    ),
    ground_truth=(Interval(0, 10), Interval(20, 30)),
)
summary = highlight_eval([highlight])
print("\nhighlight detection:")
print("  mAP   :", round(summary.mean_ap, 4))
print("  HIT@1 :", summary.hit_at_1)
print("  detail:", summary.protocol)

# Tightening the HIT@1 alignment threshold can only shrink the hit set.
for tau in (0.3, 0.5, 0.7):
    print(f"  HIT@1 at tau={tau}:", highlight_eval([highlight], hit_iou=tau).hit_at_1)
