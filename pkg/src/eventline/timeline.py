"""Event timelines and their boundary constraints.

A timeline is a video's ordered list of (interval, caption) events. A *valid*
timeline has events sorted by start, pairwise non-overlapping (touching
boundaries allowed), staying inside [0, duration], and covering the video up
to a small tolerance. Candidate data is representable in any broken state:
``validate`` reports violations instead of refusing to construct, and
``normalize`` repairs what a tolerance-sized repair can fix.

Timestamps are decimal seconds with centisecond rendering ("161.00" style).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import (
    EmptyInputError,
    SchemaViolationError,
    UnrepairableError,
    ZeroDurationError,
)

# Gaps shorter than this are treated as float noise, not coverage holes.
GAP_NOISE_FLOOR = 1e-9


def format_seconds(value: float) -> str:
    """Render seconds at centisecond precision: 161 -> '161.00'."""
    return f"{value:.2f}"


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Interval:
    """A [start, end) window in seconds.

    A *valid* interval has start < end; degenerate values are representable
    so validators can inspect candidate data.
    """

    start: float
    end: float

    def __post_init__(self):
        object.__setattr__(self, "start", _check_finite("start", self.start))
        object.__setattr__(self, "end", _check_finite("end", self.end))

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def valid(self) -> bool:
        return self.start < self.end

    def __str__(self) -> str:
        return f"{format_seconds(self.start)} - {format_seconds(self.end)}"


@dataclass(frozen=True)
class Event:
    """One captioned segment of a timeline."""

    index: int
    interval: Interval
    caption: str

    @property
    def start(self) -> float:
        return self.interval.start

    @property
    def end(self) -> float:
        return self.interval.end


@dataclass(frozen=True)
class Timeline:
    """A video's event list plus its total duration in seconds."""

    video_id: str
    duration: float
    events: tuple[Event, ...]

    def __post_init__(self):
        object.__setattr__(self, "duration", _check_finite("duration", self.duration))
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self) -> int:
        return len(self.events)

    @property
    def captions(self) -> list[str]:
        return [e.caption for e in self.events]


@dataclass(frozen=True)
class ValidationPolicy:
    """Tolerances applied by validate/normalize.

    eps_cov: maximum tolerated total gap (seconds); also bounds the head gap
    before the first event and the tail gap after the last one.
    """

    eps_cov: float = 0.5


DEFAULT_POLICY = ValidationPolicy()


class ViolationKind(str, enum.Enum):
    OVERLAP = "Overlap"
    GAP = "Gap"
    OUT_OF_BOUNDS = "OutOfBounds"
    UNSORTED = "Unsorted"
    EMPTY_CAPTION = "EmptyCaption"
    ZERO_LENGTH = "ZeroLength"


_KIND_ORDER = {kind: i for i, kind in enumerate(ViolationKind)}


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    indices: tuple[int, ...]
    magnitude: float
    message: str = ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "indices": list(self.indices),
            "magnitude": self.magnitude,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}

    def to_json(self) -> dict:
        return {"violations": [v.to_json() for v in self.violations]}


def _sort_key(violation: Violation) -> tuple:
    first = violation.indices[0] if violation.indices else -1
    return (_KIND_ORDER[violation.kind], first, violation.indices, violation.magnitude)


def validate(timeline: Timeline, policy: ValidationPolicy = DEFAULT_POLICY) -> ValidationReport:
    """Report every constraint violation in a candidate timeline.

    Never raises on malformed content; the report is the result. Ordering is
    deterministic: by kind (Overlap, Gap, OutOfBounds, Unsorted, EmptyCaption,
    ZeroLength), then by first event index.
    """
    violations: list[Violation] = []
    events = timeline.events
    duration = timeline.duration

    for i, ev in enumerate(events):
        if ev.interval.end <= ev.interval.start:
            violations.append(
                Violation(
                    ViolationKind.ZERO_LENGTH,
                    (i,),
                    ev.interval.start - ev.interval.end,
                    f"event {i} has non-positive length",
                )
            )
        if not ev.caption.strip():
            violations.append(
                Violation(ViolationKind.EMPTY_CAPTION, (i,), 0.0, f"event {i} caption is blank")
            )
        excess = max(0.0, -ev.interval.start) + max(0.0, ev.interval.end - duration)
        if excess > 0.0:
            violations.append(
                Violation(
                    ViolationKind.OUT_OF_BOUNDS,
                    (i,),
                    excess,
                    f"event {i} exceeds [0, {format_seconds(duration)}]",
                )
            )

    for i in range(len(events) - 1):
        if events[i + 1].interval.start < events[i].interval.start:
            violations.append(
                Violation(
                    ViolationKind.UNSORTED,
                    (i, i + 1),
                    events[i].interval.start - events[i + 1].interval.start,
                    f"event {i + 1} starts before event {i}",
                )
            )

    # Overlap/coverage are judged on the sorted view (with original indices)
    # so an unsorted input still gets meaningful boundary diagnostics.
    # Degenerate-length events are excluded: their boundaries are meaningless.
    order = sorted(
        (i for i, ev in enumerate(events) if ev.interval.valid),
        key=lambda i: (events[i].interval.start, events[i].interval.end, i),
    )
    gaps: list[Violation] = []
    total_gap = 0.0
    if order:
        head = max(0.0, events[order[0]].interval.start)
        total_gap += head
        if head > GAP_NOISE_FLOOR:
            gaps.append(
                Violation(
                    ViolationKind.GAP,
                    (order[0],),
                    head,
                    "video start is uncovered",
                )
            )
        for a, b in zip(order, order[1:]):
            delta = events[b].interval.start - events[a].interval.end
            if delta < -GAP_NOISE_FLOOR:
                violations.append(
                    Violation(
                        ViolationKind.OVERLAP,
                        (a, b),
                        -delta,
                        f"events {a} and {b} overlap",
                    )
                )
            elif delta > 0.0:
                total_gap += delta
                if delta > GAP_NOISE_FLOOR:
                    gaps.append(
                        Violation(
                            ViolationKind.GAP,
                            (a, b),
                            delta,
                            f"gap between events {a} and {b}",
                        )
                    )
        tail = max(0.0, duration - events[order[-1]].interval.end)
        total_gap += tail
        if tail > GAP_NOISE_FLOOR:
            gaps.append(
                Violation(
                    ViolationKind.GAP,
                    (order[-1],),
                    tail,
                    "video end is uncovered",
                )
            )
    else:
        total_gap = max(0.0, duration)
        if total_gap > GAP_NOISE_FLOOR:
            gaps.append(Violation(ViolationKind.GAP, (), total_gap, "timeline has no events"))

    # Coverage is an aggregate budget: individual gaps only violate once the
    # total exceeds eps_cov (any single gap > eps_cov implies that already).
    if total_gap > policy.eps_cov:
        violations.extend(gaps)

    return ValidationReport(tuple(sorted(violations, key=_sort_key)))


def normalize(
    raw_events: list[Event] | tuple[Event, ...],
    duration: float,
    policy: ValidationPolicy = DEFAULT_POLICY,
    *,
    video_id: str = "",
) -> Timeline:
    """Repair a raw event list into a validate-clean timeline.

    Repairs, in order: clamp intervals to [0, duration], sort by start,
    truncate the earlier of two overlapping events at the later's start,
    close gaps <= eps_cov by extending the earlier event's end (the first
    event's start is pulled to 0 and the last end pushed to duration for
    head/tail gaps). Output events are re-indexed 0..N-1.

    Raises UnrepairableError when a gap > eps_cov remains, an event collapses
    to zero length, or a caption is blank (captions cannot be invented).
    """
    if not raw_events:
        raise EmptyInputError("normalize requires at least one event")
    duration = _check_finite("duration", duration)
    if duration <= 0:
        raise ZeroDurationError("duration must be positive")

    spans: list[tuple[float, float, str]] = []
    for i, ev in enumerate(raw_events):
        caption = ev.caption.strip()
        if not caption:
            raise UnrepairableError(f"event {ev.index} has a blank caption")
        start = min(max(ev.interval.start, 0.0), duration)
        end = min(max(ev.interval.end, 0.0), duration)
        if end <= start:
            raise UnrepairableError(
                f"event {ev.index} collapses to zero length after clamping"
            )
        spans.append((start, end, caption))
    spans.sort(key=lambda s: (s[0], s[1]))

    starts = [s[0] for s in spans]
    ends = [s[1] for s in spans]
    for i in range(len(spans) - 1):
        if ends[i] > starts[i + 1]:
            ends[i] = starts[i + 1]
            if ends[i] <= starts[i]:
                raise UnrepairableError(
                    f"event at {format_seconds(starts[i])} collapses to zero length "
                    "after overlap truncation"
                )

    if starts[0] > 0.0:
        if starts[0] > policy.eps_cov:
            raise UnrepairableError(
                f"uncovered head of {format_seconds(starts[0])} s exceeds tolerance"
            )
        starts[0] = 0.0
    for i in range(len(spans) - 1):
        gap = starts[i + 1] - ends[i]
        if gap > 0.0:
            if gap > policy.eps_cov:
                raise UnrepairableError(
                    f"gap of {format_seconds(gap)} s after event {i} exceeds tolerance"
                )
            ends[i] = starts[i + 1]
    tail = duration - ends[-1]
    if tail > 0.0:
        if tail > policy.eps_cov:
            raise UnrepairableError(
                f"uncovered tail of {format_seconds(tail)} s exceeds tolerance"
            )
        ends[-1] = duration

    events = tuple(
        Event(index=i, interval=Interval(starts[i], ends[i]), caption=spans[i][2])
        for i in range(len(spans))
    )
    result = Timeline(video_id=video_id, duration=duration, events=events)
    report = validate(result, policy)
    if not report.ok:
        raise UnrepairableError(
            "normalization left violations: "
            + ", ".join(sorted({v.kind.value for v in report.violations}))
        )
    return result


def coverage_ratio(timeline: Timeline) -> float:
    """Fraction of [0, duration] covered by the union of event intervals."""
    if timeline.duration <= 0:
        raise ZeroDurationError("coverage requires a positive duration")
    spans = sorted(
        (max(0.0, ev.interval.start), min(timeline.duration, ev.interval.end))
        for ev in timeline.events
        if ev.interval.valid
    )
    covered = 0.0
    cursor = 0.0
    for start, end in spans:
        if end <= cursor:
            continue
        covered += end - max(start, cursor)
        cursor = end
    return min(1.0, covered / timeline.duration)


def event_density(timeline: Timeline) -> float:
    """Events per minute."""
    if timeline.duration <= 0:
        raise ZeroDurationError("density requires a positive duration")
    return len(timeline.events) / (timeline.duration / 60.0)


# --- canonical JSON schema ---------------------------------------------------
# {"video_id": str, "duration": number,
#  "events": [{"id": int, "start": number, "end": number, "caption": str}]}


def event_to_json(event: Event) -> dict:
    return {
        "id": event.index,
        "start": event.interval.start,
        "end": event.interval.end,
        "caption": event.caption,
    }


def event_from_json(obj: dict) -> Event:
    try:
        return Event(
            index=int(obj["id"]),
            interval=Interval(float(obj["start"]), float(obj["end"])),
            caption=str(obj["caption"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolationError(f"bad event object: {exc}") from exc


def timeline_to_json(timeline: Timeline) -> dict:
    return {
        "video_id": timeline.video_id,
        "duration": timeline.duration,
        "events": [event_to_json(e) for e in timeline.events],
    }


def timeline_from_json(obj: dict) -> Timeline:
    if not isinstance(obj, dict):
        raise SchemaViolationError("timeline must be a JSON object")
    try:
        video_id = str(obj["video_id"])
        duration = float(obj["duration"])
        raw_events = obj["events"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolationError(f"bad timeline object: {exc}") from exc
    if not isinstance(raw_events, list):
        raise SchemaViolationError("timeline 'events' must be a list")
    try:
        events = tuple(event_from_json(e) for e in raw_events)
        return Timeline(video_id=video_id, duration=duration, events=events)
    except ValueError as exc:
        raise SchemaViolationError(str(exc)) from exc
