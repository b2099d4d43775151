"""Masked-event training records built from dense timelines.

One event is hidden per sample: the window stays visible in the prompt, only
the caption is withheld. The supervised answer is the caption, optionally
preceded by numbered reasoning steps produced by an upstream judge. The
prompt/answer pair realizes the infilling objective as plain training data.
"""

from __future__ import annotations

import hashlib
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .errors import (
    IndexOutOfRangeError,
    MalformedResponseError,
    SchemaViolationError,
    TemplateInvalidError,
    TooFewEventsError,
)
from .llm import ChatRequest, LlmClient, Message
from .parsing import canonical_line
from .timeline import Event, Interval, Timeline, event_from_json, event_to_json, format_seconds

MIN_EVENTS_DEFAULT = 3

MODE_SUPERVISE = "supervise"
MODE_PSEUDO_LABEL = "pseudo_label"

PLACEHOLDERS = ("events_before", "masked_window", "events_after", "instruction")

DEFAULT_INSTRUCTION = (
    "One event in this video timeline is hidden. Use the surrounding events to infer "
    "what happens inside the masked window. Reply with numbered reasoning steps, then "
    "one line starting with 'Event:' that describes the hidden event."
)

REASONING_SYSTEM_PROMPT = (
    "You reconstruct missing segments of video timelines. Given the events before and "
    "after a masked window, reply with numbered reasoning steps (one per line, '1.', "
    "'2.', ...) followed by a final line 'Event: <description of the hidden event>'."
)


@dataclass(frozen=True)
class PromptTemplate:
    """Prompt scaffold; must use each placeholder exactly once."""

    name: str
    body: str

    def validate(self) -> None:
        counts = {name: 0 for name in PLACEHOLDERS}
        for _, field_name, _, _ in string.Formatter().parse(self.body):
            if field_name is None:
                continue
            if field_name not in counts:
                raise TemplateInvalidError(f"unknown placeholder {{{field_name}}} in template {self.name!r}")
            counts[field_name] += 1
        missing = [name for name, n in counts.items() if n != 1]
        if missing:
            raise TemplateInvalidError(
                f"template {self.name!r} must use each placeholder exactly once; bad: {missing}"
            )

    @property
    def hash(self) -> str:
        digest = hashlib.sha256(f"{self.name}\n{self.body}".encode("utf-8")).hexdigest()
        return digest[:16]


DEFAULT_TEMPLATE = PromptTemplate(
    name="masked-window-v1",
    body=(
        "{instruction}\n"
        "\n"
        "Events before the masked window:\n"
        "{events_before}\n"
        "\n"
        "Masked window: {masked_window}\n"
        "\n"
        "Events after the masked window:\n"
        "{events_after}\n"
    ),
)

TEMPLATES = {DEFAULT_TEMPLATE.name: DEFAULT_TEMPLATE}


@dataclass(frozen=True)
class MaskedSample:
    """One training record: context events around a hidden one.

    duration is carried so the source timeline can be reconstructed exactly.
    prompt_text/answer_text are empty until render() runs.
    """

    video_id: str
    duration: float
    masked_index: int
    masked_window: Interval
    context_before: tuple[Event, ...]
    context_after: tuple[Event, ...]
    target_caption: str
    reasoning: tuple[str, ...] | None = None
    prompt_text: str = ""
    answer_text: str = ""
    template_hash: str = ""


def mask_event(timeline: Timeline, index: int, min_events: int = MIN_EVENTS_DEFAULT) -> MaskedSample:
    """Hide the caption of events[index]; the window itself stays visible."""
    n = len(timeline.events)
    if n < min_events:
        raise TooFewEventsError(f"need at least {min_events} events, got {n}")
    if not 0 <= index < n:
        raise IndexOutOfRangeError(f"index {index} outside 0..{n - 1}")
    target = timeline.events[index]
    return MaskedSample(
        video_id=timeline.video_id,
        duration=timeline.duration,
        masked_index=index,
        masked_window=target.interval,
        context_before=timeline.events[:index],
        context_after=timeline.events[index + 1 :],
        target_caption=target.caption,
    )


def sample_mask(timeline: Timeline, seed: int, min_events: int = MIN_EVENTS_DEFAULT) -> int:
    """Pick the event index to mask: uniform, deterministic per (timeline, seed).

    Hash-based so the draw is independent of processing order and identical
    across worker counts.
    """
    n = len(timeline.events)
    if n < min_events:
        raise TooFewEventsError(f"need at least {min_events} events, got {n}")
    digest = hashlib.sha256(f"{timeline.video_id}|{n}|{seed}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % n


def reconstruct(sample: MaskedSample, caption: str | None = None) -> Timeline:
    """Reinsert the masked event; with the original caption this inverts mask_event."""
    hidden = Event(
        index=sample.masked_index,
        interval=sample.masked_window,
        caption=sample.target_caption if caption is None else caption,
    )
    events = sample.context_before + (hidden,) + sample.context_after
    return Timeline(video_id=sample.video_id, duration=sample.duration, events=events)


def _render_context(events: tuple[Event, ...]) -> str:
    if not events:
        return "(none)"
    return "\n".join(canonical_line(e) for e in events)


def render_answer(sample: MaskedSample) -> str:
    """Numbered steps then an 'Event:' line; the bare caption when no reasoning."""
    if not sample.reasoning:
        return sample.target_caption
    steps = "\n".join(f"{i}. {step}" for i, step in enumerate(sample.reasoning, start=1))
    return f"{steps}\nEvent: {sample.target_caption}"


def render(
    sample: MaskedSample,
    template: PromptTemplate = DEFAULT_TEMPLATE,
    instruction: str = DEFAULT_INSTRUCTION,
) -> MaskedSample:
    """Fill prompt_text/answer_text. The target caption never enters the prompt."""
    template.validate()
    window = (
        f"{format_seconds(sample.masked_window.start)} - "
        f"{format_seconds(sample.masked_window.end)}"
    )
    prompt = template.body.format(
        instruction=instruction,
        events_before=_render_context(sample.context_before),
        masked_window=window,
        events_after=_render_context(sample.context_after),
    )
    return replace(
        sample,
        prompt_text=prompt,
        answer_text=render_answer(sample),
        template_hash=template.hash,
    )


# --- reasoning attachment -----------------------------------------------------

_STEP_PREFIXES = ("step",)


def parse_reasoning_response(text: str) -> tuple[tuple[str, ...], str | None]:
    """Split a judge response into numbered steps and an optional 'Event:' line.

    Raises MalformedResponseError when no numbered step structure is present.
    """
    steps: list[str] = []
    pseudo: str | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        lowered = line.lower()
        if lowered.startswith("event:"):
            pseudo = line[len("event:") :].strip()
            continue
        body = line
        for prefix in _STEP_PREFIXES:
            if lowered.startswith(prefix):
                body = line[len(prefix) :].lstrip()
                break
        head, sep, rest = body.partition(".")
        if not sep or not head.strip().isdigit():
            head, sep, rest = body.partition(")")
        if sep and head.strip().isdigit() and rest.strip():
            steps.append(rest.strip())
    if not steps:
        raise MalformedResponseError("judge response has no numbered reasoning steps")
    return tuple(steps), pseudo


def reasoning_request(
    sample: MaskedSample, template: PromptTemplate = DEFAULT_TEMPLATE
) -> ChatRequest:
    """The exact request attach_reasoning sends; exposed for replay fixtures."""
    prompt = sample.prompt_text or render(sample, template).prompt_text
    return ChatRequest(
        messages=(
            Message("system", REASONING_SYSTEM_PROMPT),
            Message("user", prompt),
        )
    )


def attach_reasoning(
    sample: MaskedSample,
    client: LlmClient,
    mode: str = MODE_SUPERVISE,
    template: PromptTemplate = DEFAULT_TEMPLATE,
) -> MaskedSample:
    """Populate reasoning (and, in pseudo-label mode, the target) from a judge.

    The judge sees the same masked prompt the trainee would; its numbered
    steps become the sample's reasoning. In pseudo-label mode the judge's
    'Event:' line replaces the target caption.
    """
    if mode not in (MODE_SUPERVISE, MODE_PSEUDO_LABEL):
        raise ValueError(f"unknown reasoning mode {mode!r}")
    response = client.complete(reasoning_request(sample, template))
    steps, pseudo = parse_reasoning_response(response)
    target = sample.target_caption
    if mode == MODE_PSEUDO_LABEL:
        if not pseudo:
            raise MalformedResponseError("pseudo-label mode requires an 'Event:' line")
        target = pseudo
    return replace(sample, reasoning=steps, target_caption=target)


def attach_reasoning_many(
    samples: list[MaskedSample],
    client: LlmClient,
    mode: str = MODE_SUPERVISE,
    workers: int = 1,
) -> list[MaskedSample]:
    """attach_reasoning over many samples, bounded concurrency, order preserved."""
    if workers <= 1:
        return [attach_reasoning(s, client, mode) for s in samples]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: attach_reasoning(s, client, mode), samples))


def build_record(
    timeline: Timeline,
    index: int,
    template: PromptTemplate = DEFAULT_TEMPLATE,
    client: LlmClient | None = None,
    mode: str = MODE_SUPERVISE,
) -> MaskedSample:
    """mask -> (judge) -> render, the full single-timeline pipeline."""
    sample = mask_event(timeline, index)
    if client is not None:
        sample = attach_reasoning(sample, client, mode, template)
    return render(sample, template)


# --- JSONL record schema ------------------------------------------------------


def sample_to_json(sample: MaskedSample) -> dict:
    context = sample.context_before + sample.context_after
    return {
        "video_id": sample.video_id,
        "duration": sample.duration,
        "masked_index": sample.masked_index,
        "window": {"start": sample.masked_window.start, "end": sample.masked_window.end},
        "context": [event_to_json(e) for e in context],
        "reasoning": list(sample.reasoning) if sample.reasoning else [],
        "target": sample.target_caption,
        "prompt": sample.prompt_text,
        "answer": sample.answer_text,
        "template_hash": sample.template_hash,
    }


def sample_from_json(obj: dict) -> MaskedSample:
    try:
        context = tuple(event_from_json(e) for e in obj["context"])
        masked_index = int(obj["masked_index"])
        window = Interval(float(obj["window"]["start"]), float(obj["window"]["end"]))
        reasoning = tuple(str(s) for s in obj.get("reasoning", []))
        return MaskedSample(
            video_id=str(obj["video_id"]),
            duration=float(obj["duration"]),
            masked_index=masked_index,
            masked_window=window,
            context_before=context[:masked_index],
            context_after=context[masked_index:],
            target_caption=str(obj["target"]),
            reasoning=reasoning or None,
            prompt_text=str(obj.get("prompt", "")),
            answer_text=str(obj.get("answer", "")),
            template_hash=str(obj.get("template_hash", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolationError(f"bad masked-sample object: {exc}") from exc
