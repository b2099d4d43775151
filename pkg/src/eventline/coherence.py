"""Relevance filtering: drop videos whose event captions do not hang together.

Two judges are provided. The heuristic judge is the deterministic offline
path: adjacent captions count as related when they share at least one content
token (lowercased, stop words removed), and the video passes when the related
fraction reaches a threshold. The LLM judge delegates the causal-relatedness
decision to an upstream model and parses a binary verdict. A motion-score
filter removes near-static videos before any judging happens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol

from .errors import MalformedResponseError, TooFewEventsError
from .llm import ChatRequest, LlmClient, Message
from .timeline import Timeline

HEURISTIC_THRESHOLD = 0.3
STOP_WORDS_VERSION = "en-stop-v1"

# Versioned in-repo so heuristic verdicts are reproducible across releases.
STOP_WORDS = frozenset(
    """
    a an the and or but if then than so as of in on at by for with from into onto
    over under up down out off to is are was were be been being am do does did
    done have has had having it its itself this that these those there here he
    she they them his her their we you i me my your our us not no nor very too
    just about after before during while again once all any both each few more
    most other some such only own same can will would should could may might
    must shall
    """.split()
)

_TOKEN_RE = re.compile(r"[a-z0-9']+")


def content_tokens(text: str) -> set[str]:
    return {t for t in _TOKEN_RE.findall(text.lower()) if t not in STOP_WORDS}


def heuristic_score(captions: list[str]) -> float:
    """Fraction of adjacent caption pairs sharing a content token."""
    if len(captions) < 2:
        raise TooFewEventsError("relatedness needs at least two captions")
    token_sets = [content_tokens(c) for c in captions]
    hits = sum(1 for a, b in zip(token_sets, token_sets[1:]) if a & b)
    return hits / (len(captions) - 1)


@dataclass(frozen=True)
class CoherenceVerdict:
    video_id: str
    relevant: bool
    rationale: str
    judge_id: str

    def __post_init__(self):
        if not self.relevant and not self.rationale:
            raise ValueError("a negative verdict needs a rationale")


@dataclass(frozen=True)
class MotionRecord:
    """Normalized mean absolute inter-frame difference, in [0, 1]."""

    video_id: str
    motion_score: float

    def __post_init__(self):
        if not 0.0 <= self.motion_score <= 1.0:
            raise ValueError(f"motion_score out of [0,1]: {self.motion_score}")


class Judge(Protocol):
    judge_id: str

    def judge(self, timeline: Timeline) -> CoherenceVerdict: ...


class HeuristicJudge:
    """Deterministic token-overlap judge; the offline stand-in for an LLM."""

    def __init__(self, threshold: float = HEURISTIC_THRESHOLD):
        self.threshold = threshold
        self.judge_id = f"heuristic-overlap-{STOP_WORDS_VERSION}"

    def judge(self, timeline: Timeline) -> CoherenceVerdict:
        score = heuristic_score(timeline.captions)
        relevant = score >= self.threshold
        rationale = (
            f"adjacent-caption overlap {score:.3f} "
            f"{'reaches' if relevant else 'below'} threshold {self.threshold:g}"
        )
        return CoherenceVerdict(
            video_id=timeline.video_id,
            relevant=relevant,
            rationale=rationale,
            judge_id=self.judge_id,
        )


COHERENCE_SYSTEM_PROMPT = (
    "You check whether a video's event captions form a causally related progression. "
    "Think in numbered steps ('1.', '2.', ...), then finish with exactly one line "
    "'Decision: yes' if the events are causally related or 'Decision: no' otherwise."
)

_DECISION_RE = re.compile(r"(?im)^\s*decision\s*:\s*(yes|no)\b")


def coherence_request(timeline: Timeline) -> ChatRequest:
    """The exact request an LLM judge sends; exposed so replay fixtures can be built."""
    listing = "\n".join(
        f"{i + 1}. [{ev.interval}] {ev.caption}" for i, ev in enumerate(timeline.events)
    )
    return ChatRequest(
        messages=(
            Message("system", COHERENCE_SYSTEM_PROMPT),
            Message("user", f"Event captions for video {timeline.video_id}:\n{listing}"),
        )
    )


class LlmJudge:
    """Asks an upstream model for the binary relatedness decision."""

    def __init__(self, client: LlmClient, judge_id: str = "llm-coherence-v1"):
        self.client = client
        self.judge_id = judge_id

    def judge(self, timeline: Timeline) -> CoherenceVerdict:
        response = self.client.complete(coherence_request(timeline))
        match = _DECISION_RE.search(response)
        if not match:
            raise MalformedResponseError("judge response lacks a 'Decision: yes/no' line")
        relevant = match.group(1).lower() == "yes"
        rationale = response.strip()
        return CoherenceVerdict(
            video_id=timeline.video_id,
            relevant=relevant,
            rationale=rationale,
            judge_id=self.judge_id,
        )


def judge_coherence(timeline: Timeline, judge: Judge) -> CoherenceVerdict:
    if len(timeline.events) < 2:
        raise TooFewEventsError("coherence judging needs at least two events")
    return judge.judge(timeline)


def motion_filter(
    records: Iterable[MotionRecord], threshold: float
) -> tuple[list[str], list[str]]:
    """Partition video ids: kept iff motion_score >= threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold out of [0,1]: {threshold}")
    kept: list[str] = []
    dropped: list[str] = []
    for record in records:
        (kept if record.motion_score >= threshold else dropped).append(record.video_id)
    return kept, dropped


@dataclass(frozen=True)
class DropEntry:
    """One drop-log line; relevant is None for judge errors."""

    video_id: str
    stage: str
    relevant: bool | None
    rationale: str
    judge_id: str

    def to_json(self) -> dict:
        return {
            "video_id": self.video_id,
            "stage": self.stage,
            "relevant": self.relevant,
            "rationale": self.rationale,
            "judge_id": self.judge_id,
        }


def filter_corpus(records: Iterable, judge: Judge, drop_log: list[DropEntry]) -> Iterator:
    """Stream records, keeping the relevant ones; drops and errors are logged.

    Judge failures never halt the stream: the record is dropped with an
    error entry (relevant=None). Every input lands in exactly one of
    {kept, dropped, errored}.
    """
    for record in records:
        try:
            verdict = judge_coherence(record.timeline, judge)
        except Exception as exc:  # per-record isolation, including upstream errors
            drop_log.append(
                DropEntry(
                    video_id=record.timeline.video_id,
                    stage="coherence",
                    relevant=None,
                    rationale=f"{type(exc).__name__}: {exc}",
                    judge_id=getattr(judge, "judge_id", "unknown"),
                )
            )
            continue
        if verdict.relevant:
            yield record
        else:
            drop_log.append(
                DropEntry(
                    video_id=verdict.video_id,
                    stage="coherence",
                    relevant=False,
                    rationale=verdict.rationale,
                    judge_id=verdict.judge_id,
                )
            )
