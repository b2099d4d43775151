import random

import pytest

from eventline.coherence import (
    CoherenceVerdict,
    DropEntry,
    HeuristicJudge,
    LlmJudge,
    MotionRecord,
    STOP_WORDS,
    content_tokens,
    filter_corpus,
    heuristic_score,
    judge_coherence,
    motion_filter,
)
from eventline.corpus import CorpusRecord
from eventline.errors import MalformedResponseError, TooFewEventsError
from eventline.llm import ClientConfig, LlmClient
from eventline.timeline import Event, Interval, Timeline
from helpers import make_timeline
from test_llm import ScriptedTransport


def captions_timeline(captions, video_id="v"):
    n = len(captions)
    events = tuple(
        Event(index=i, interval=Interval(float(i), float(i + 1)), caption=c)
        for i, c in enumerate(captions)
    )
    return Timeline(video_id=video_id, duration=float(n), events=events)


def make_llm_judge(responses):
    client = LlmClient(
        ClientConfig(requests_per_minute=1000000),
        transport=ScriptedTransport(responses),
        sleep=lambda s: None,
    )
    return LlmJudge(client)


class TestHeuristicScore:
    def test_cooking_sequence_is_relevant(self):
        # both adjacent pairs share the content token "eggs": score 2/2
        captions = ["crack eggs into bowl", "whisk the eggs", "pour eggs into pan"]
        assert heuristic_score(captions) == 1.0
        verdict = judge_coherence(captions_timeline(captions), HeuristicJudge())
        assert verdict.relevant is True

    def test_unrelated_pair_not_relevant(self):
        captions = ["a dog runs", "stock chart rises"]
        assert heuristic_score(captions) == 0.0
        verdict = judge_coherence(captions_timeline(captions), HeuristicJudge())
        assert verdict.relevant is False
        assert verdict.rationale  # negative verdicts carry a reason

    def test_identical_captions(self):
        assert heuristic_score(["same thing here"] * 4 ) == 1.0

    def test_disjoint_vocabularies(self):
        assert heuristic_score(["alpha beta", "gamma delta", "epsilon zeta"]) == 0.0

    def test_one_of_two_pairs(self):
        # only the first pair shares "eggs": 1 of 2 adjacent pairs
        captions = ["crack eggs", "eggs sizzle", "credits roll"]
        assert heuristic_score(captions) == 0.5

    def test_too_few(self):
        with pytest.raises(TooFewEventsError):
            heuristic_score(["only one"])

    def test_stop_words_do_not_link(self):
        assert heuristic_score(["the dog and a cat", "the chart and a graph"]) == 0.0
        assert "the" in STOP_WORDS and "and" in STOP_WORDS

    def test_content_tokens(self):
        assert content_tokens("Crack the EGGS, into a bowl!") == {"crack", "eggs", "bowl"}

    def test_determinism_across_runs(self):
        rng = random.Random(1)
        captions = [f"action {rng.randrange(5)} on object {rng.randrange(5)}" for _ in range(6)]
        judge = HeuristicJudge()
        t = captions_timeline(captions)
        verdicts = {judge_coherence(t, judge).relevant for _ in range(10)}
        assert len(verdicts) == 1


class TestJudgeCoherence:
    def test_single_event_too_few(self):
        with pytest.raises(TooFewEventsError):
            judge_coherence(captions_timeline(["only"]), HeuristicJudge())

    def test_llm_judge_yes(self):
        judge = make_llm_judge(["1. clearly a recipe\nDecision: yes"])
        verdict = judge_coherence(captions_timeline(["a", "b"]), judge)
        assert verdict.relevant is True
        assert verdict.judge_id == "llm-coherence-v1"

    def test_llm_judge_no(self):
        judge = make_llm_judge(["1. nothing connects\nDecision: no"])
        verdict = judge_coherence(captions_timeline(["a", "b"]), judge)
        assert verdict.relevant is False
        assert "nothing connects" in verdict.rationale

    def test_llm_judge_malformed(self):
        judge = make_llm_judge(["probably fine I guess"])
        with pytest.raises(MalformedResponseError):
            judge_coherence(captions_timeline(["a", "b"]), judge)

    def test_negative_verdict_requires_rationale(self):
        with pytest.raises(ValueError):
            CoherenceVerdict("v", False, "", "j")


class TestMotionFilter:
    def test_zero_score_dropped_by_any_positive_threshold(self):
        kept, dropped = motion_filter([MotionRecord("a", 0.0)], 0.01)
        assert (kept, dropped) == ([], ["a"])

    def test_zero_threshold_keeps_everything(self):
        records = [MotionRecord(f"v{i}", i / 10) for i in range(5)]
        kept, dropped = motion_filter(records, 0.0)
        assert len(kept) == 5 and dropped == []

    def test_boundary_is_inclusive(self):
        records = [MotionRecord("a", 0.1), MotionRecord("b", 0.4), MotionRecord("c", 0.9)]
        kept, dropped = motion_filter(records, 0.4)
        assert kept == ["b", "c"]
        assert dropped == ["a"]

    def test_partition_is_exhaustive(self):
        rng = random.Random(2)
        records = [MotionRecord(f"v{i}", rng.random()) for i in range(100)]
        kept, dropped = motion_filter(records, 0.5)
        assert len(kept) + len(dropped) == 100
        assert set(kept).isdisjoint(dropped)

    def test_monotone_in_threshold(self):
        rng = random.Random(3)
        records = [MotionRecord(f"v{i}", rng.random()) for i in range(60)]
        previous = None
        for threshold in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
            kept = set(motion_filter(records, threshold)[0])
            if previous is not None:
                assert kept <= previous
            previous = kept

    def test_score_validation(self):
        with pytest.raises(ValueError):
            MotionRecord("v", 1.5)
        with pytest.raises(ValueError):
            motion_filter([], -0.1)


class AllRelevantJudge:
    judge_id = "mock-yes"

    def judge(self, timeline):
        return CoherenceVerdict(timeline.video_id, True, "", self.judge_id)


class AllIrrelevantJudge:
    judge_id = "mock-no"

    def judge(self, timeline):
        return CoherenceVerdict(timeline.video_id, False, "nope", self.judge_id)


class ExplodingJudge:
    judge_id = "mock-boom"

    def __init__(self, failing_video_ids):
        self.failing = set(failing_video_ids)

    def judge(self, timeline):
        if timeline.video_id in self.failing:
            raise RuntimeError("synthetic failure")
        return CoherenceVerdict(timeline.video_id, True, "", self.judge_id)


def records_for(timelines):
    return [CorpusRecord(timeline=t, category="cooking") for t in timelines]


class TestFilterCorpus:
    def test_all_relevant_keeps_everything(self):
        rng = random.Random(4)
        records = records_for([make_timeline(rng) for _ in range(5)])
        drop_log: list[DropEntry] = []
        kept = list(filter_corpus(records, AllRelevantJudge(), drop_log))
        assert kept == records
        assert drop_log == []

    def test_all_irrelevant_drops_everything(self):
        rng = random.Random(5)
        records = records_for([make_timeline(rng) for _ in range(5)])
        drop_log: list[DropEntry] = []
        kept = list(filter_corpus(records, AllIrrelevantJudge(), drop_log))
        assert kept == []
        assert len(drop_log) == 5
        assert all(e.relevant is False and e.stage == "coherence" for e in drop_log)

    def test_error_on_one_record_does_not_halt(self):
        rng = random.Random(6)
        timelines = [make_timeline(rng) for _ in range(3)]
        records = records_for(timelines)
        drop_log: list[DropEntry] = []
        judge = ExplodingJudge([timelines[1].video_id])
        kept = list(filter_corpus(records, judge, drop_log))
        assert len(kept) == 2
        assert len(drop_log) == 1
        assert drop_log[0].relevant is None
        assert "synthetic failure" in drop_log[0].rationale

    def test_partition_invariant(self):
        rng = random.Random(7)
        timelines = [make_timeline(rng) for _ in range(30)]
        failing = {t.video_id for t in timelines[::7]}
        records = records_for(timelines)
        drop_log: list[DropEntry] = []
        kept = list(filter_corpus(records, ExplodingJudge(failing), drop_log))
        assert len(kept) + len(drop_log) == len(records)

    def test_drop_entry_json_schema(self):
        entry = DropEntry("vid", "coherence", False, "because", "judge-1")
        assert entry.to_json() == {
            "video_id": "vid",
            "stage": "coherence",
            "relevant": False,
            "rationale": "because",
            "judge_id": "judge-1",
        }
