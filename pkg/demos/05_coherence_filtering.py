"""
Filtering videos whose captions do not hang together
====================================================

Masked-event training only works when the surrounding events let you infer
the hidden one. Videos with unrelated captions are filtered out by a judge:
the deterministic heuristic (adjacent captions sharing content words) runs
offline; an LLM judge can replace it for fidelity.
"""

from eventline import Event, Interval, Timeline
from eventline.coherence import (
    DropEntry,
    HeuristicJudge,
    MotionRecord,
    filter_corpus,
    heuristic_score,
    judge_coherence,
    motion_filter,
)
from eventline.corpus import CorpusRecord


def captions_timeline(video_id, captions):
    events = tuple(
        Event(i, Interval(float(i * 10), float(i * 10 + 10)), c) for i, c in enumerate(captions)
    )
    return Timeline(video_id, 10.0 * len(captions), events)


related = captions_timeline(
    "cook-01", ["crack eggs into bowl", "whisk the eggs", "pour eggs into pan"]
)
unrelated = captions_timeline(
    "noise-02", ["a dog runs in a park", "stock chart rises", "someone paints a fence"]
)

judge = HeuristicJudge(threshold=0.3)
for timeline in (related, unrelated):
    verdict = judge_coherence(timeline, judge)
    score = heuristic_score(timeline.captions)
    print(f"{timeline.video_id}: score={score:.2f} relevant={verdict.relevant}")
    print(f"  rationale: {verdict.rationale}")

# Static videos are dropped before judging even starts, using motion scores
# from the extraction manifest (mean absolute inter-frame difference).
motions = [MotionRecord("cook-01", 0.42), MotionRecord("noise-02", 0.38),
           MotionRecord("static-03", 0.01)]
kept_ids, dropped_ids = motion_filter(motions, threshold=0.1)
print("\nmotion filter kept:", kept_ids, "dropped:", dropped_ids)

# Streaming filter over corpus records; every input lands in kept or the log.
records = [CorpusRecord(related, "cooking"), CorpusRecord(unrelated, "vlog")]
drop_log: list[DropEntry] = []
kept = list(filter_corpus(records, judge, drop_log))
print("\nkept:", [r.timeline.video_id for r in kept])
print("dropped:", [(e.video_id, e.rationale) for e in drop_log])
