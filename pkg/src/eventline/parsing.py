"""Tolerant extraction of timestamped events from free-form model output.

The grammar is line-oriented: each line either yields one event or one
diagnostic, and nothing aborts. Accepted time tokens are decimal seconds
("161.00", "161", "161s") and clock forms ("mm:ss", "hh:mm:ss", optional
fractional seconds). Accepted event lines:

    161.00 - 183.00: caption
    161.00 to 183.00: caption
    From 161.00 to 183.00, caption

with a tolerated leading list bullet ("- ", "* ", "3) "). A token containing
':' is a clock time, otherwise it is decimal seconds.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import BadNumberError, InvertedIntervalError, NoWindowFoundError
from .timeline import Event, Interval, Timeline, format_seconds

_TIME = r"\d+(?::\d+){0,2}(?:\.\d+)?"
_UNIT = r"(?:\s*(?:s|secs?|seconds?)\b)?"
_SEP = r"(?:-|–|—|to|until)"

_BULLET_RE = re.compile(r"^(?:[-*•]|\d+[.)])\s+")
_EVENT_LINE_RE = re.compile(
    rf"^(?:from\s+)?({_TIME}){_UNIT}\s*{_SEP}\s*({_TIME}){_UNIT}\s*[:,]\s*(\S.*)$",
    re.IGNORECASE,
)
_WINDOW_RE = re.compile(
    rf"(?:\bfrom\s+)?\b({_TIME}){_UNIT}\s*{_SEP}\s*({_TIME}){_UNIT}",
    re.IGNORECASE,
)
_UNIT_SUFFIX_RE = re.compile(r"\s*(s|secs?|seconds?)$", re.IGNORECASE)


class DiagnosticKind(str, enum.Enum):
    NO_TIMESTAMP = "NoTimestamp"
    INVERTED_INTERVAL = "InvertedInterval"
    BAD_NUMBER = "BadNumber"
    DUPLICATE_LINE = "DuplicateLine"


@dataclass(frozen=True)
class DiagnosticEntry:
    line: int
    kind: DiagnosticKind
    message: str

    def to_json(self) -> dict:
        return {"line": self.line, "kind": self.kind.value, "message": self.message}


@dataclass(frozen=True)
class ParseDiagnostics:
    entries: tuple[DiagnosticEntry, ...] = ()

    def kinds(self) -> set[DiagnosticKind]:
        return {e.kind for e in self.entries}

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]


@dataclass(frozen=True)
class ParsedEvent:
    """An extracted event plus where it came from (character span)."""

    interval: Interval
    caption: str
    source_span: tuple[int, int]

    def to_json(self) -> dict:
        return {
            "start": self.interval.start,
            "end": self.interval.end,
            "caption": self.caption,
            "span": list(self.source_span),
        }


def normalize_time_token(token: str) -> float:
    """Convert one time token to seconds.

    "01:23" -> 83.0; "1:02:03" -> 3723.0; "161.00" -> 161.0; "161s" -> 161.0.
    Raises BadNumberError for anything else (including clock fields >= 60).
    """
    token = _UNIT_SUFFIX_RE.sub("", token.strip())
    if not token:
        raise BadNumberError("empty time token")
    if ":" in token:
        parts = token.split(":")
        if len(parts) not in (2, 3) or not all(p for p in parts):
            raise BadNumberError(f"bad clock token {token!r}")
        try:
            seconds = float(parts[-1])
            fields = [int(p) for p in parts[:-1]]
        except ValueError as exc:
            raise BadNumberError(f"bad clock token {token!r}") from exc
        if seconds >= 60.0:
            raise BadNumberError(f"seconds field out of range in {token!r}")
        if len(parts) == 3 and fields[1] >= 60:
            raise BadNumberError(f"minutes field out of range in {token!r}")
        value = seconds
        for scale, part in zip((60.0, 3600.0), reversed(fields)):
            value += scale * part
        return value
    try:
        return float(token)
    except ValueError as exc:
        raise BadNumberError(f"bad time token {token!r}") from exc


def parse_events(text: str) -> tuple[list[ParsedEvent], ParseDiagnostics]:
    """Extract every recognizable event line; never raises.

    Returns events in textual order. Unrecognized non-blank lines, inverted
    windows, unconvertible numbers, and repeated event lines become
    diagnostics. A repeated identical line parses once.
    """
    events: list[ParsedEvent] = []
    diagnostics: list[DiagnosticEntry] = []
    seen_lines: set[str] = set()

    offset = 0
    for lineno, raw_line in enumerate(text.split("\n"), start=1):
        line = raw_line.rstrip("\r")
        stripped = line.strip()
        if stripped:
            lead = len(line) - len(line.lstrip())
            span = (offset + lead, offset + lead + len(stripped))
            _parse_line(stripped, lineno, span, events, diagnostics, seen_lines)
        offset += len(raw_line) + 1
    return events, ParseDiagnostics(tuple(diagnostics))


def _parse_line(
    stripped: str,
    lineno: int,
    span: tuple[int, int],
    events: list[ParsedEvent],
    diagnostics: list[DiagnosticEntry],
    seen_lines: set[str],
) -> None:
    body = _BULLET_RE.sub("", stripped)
    match = _EVENT_LINE_RE.match(body)
    if not match:
        diagnostics.append(
            DiagnosticEntry(lineno, DiagnosticKind.NO_TIMESTAMP, "no timestamped event on line")
        )
        return
    try:
        start = normalize_time_token(match.group(1))
        end = normalize_time_token(match.group(2))
    except BadNumberError as exc:
        diagnostics.append(DiagnosticEntry(lineno, DiagnosticKind.BAD_NUMBER, str(exc)))
        return
    if start >= end:
        diagnostics.append(
            DiagnosticEntry(
                lineno,
                DiagnosticKind.INVERTED_INTERVAL,
                f"window {format_seconds(start)} - {format_seconds(end)} is not increasing",
            )
        )
        return
    caption = match.group(3).strip()
    if not caption:
        diagnostics.append(
            DiagnosticEntry(lineno, DiagnosticKind.NO_TIMESTAMP, "event line has no caption")
        )
        return
    key = body
    if key in seen_lines:
        diagnostics.append(
            DiagnosticEntry(lineno, DiagnosticKind.DUPLICATE_LINE, "identical event line repeated")
        )
        return
    seen_lines.add(key)
    events.append(ParsedEvent(interval=Interval(start, end), caption=caption, source_span=span))


def parse_single_window(text: str) -> Interval:
    """First increasing (A, B) window found anywhere in the text.

    Raises InvertedIntervalError when only A >= B pairs exist and
    NoWindowFoundError when no time pair is present at all.
    """
    inverted_seen = False
    for match in _WINDOW_RE.finditer(text):
        try:
            start = normalize_time_token(match.group(1))
            end = normalize_time_token(match.group(2))
        except BadNumberError:
            continue
        if start < end:
            return Interval(start, end)
        inverted_seen = True
    if inverted_seen:
        raise InvertedIntervalError("only non-increasing windows found")
    raise NoWindowFoundError("no time window found")


# --- canonical rendering ------------------------------------------------------


def canonical_line(event: Event) -> str:
    """The render format used for prompts and round-tripping: 'A - B: caption'."""
    return (
        f"{format_seconds(event.interval.start)} - "
        f"{format_seconds(event.interval.end)}: {event.caption}"
    )


def render_timeline_text(timeline: Timeline) -> str:
    return "\n".join(canonical_line(e) for e in timeline.events)


def events_from_parsed(parsed: list[ParsedEvent]) -> tuple[Event, ...]:
    return tuple(
        Event(index=i, interval=p.interval, caption=p.caption) for i, p in enumerate(parsed)
    )


def timeline_from_text(text: str, *, video_id: str, duration: float) -> tuple[Timeline, ParseDiagnostics]:
    parsed, diagnostics = parse_events(text)
    timeline = Timeline(video_id=video_id, duration=duration, events=events_from_parsed(parsed))
    return timeline, diagnostics
