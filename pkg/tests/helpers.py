"""Shared generators for randomized tests: valid timelines and mutations."""

from __future__ import annotations

import random

from eventline.timeline import Event, Interval, Timeline


def make_timeline(
    rng: random.Random,
    video_id: str | None = None,
    n_events: int | None = None,
    min_duration: int = 30,
    max_duration: int = 300,
) -> Timeline:
    """An exactly tiled timeline: integer-second boundaries, segments >= 1 s.

    Captions are fixed-width unique tokens so substring scans cannot collide.
    """
    n = n_events if n_events is not None else rng.randint(3, 12)
    duration = rng.randint(max(min_duration, n + 1), max_duration)
    cuts = sorted(rng.sample(range(1, duration), n - 1))
    bounds = [0.0] + [float(c) for c in cuts] + [float(duration)]
    if video_id is None:
        video_id = f"vid{rng.randrange(16**8):08x}"
    events = tuple(
        Event(
            index=i,
            interval=Interval(bounds[i], bounds[i + 1]),
            caption=f"seg{i:02d}tok{rng.randrange(16**8):08x}",
        )
        for i in range(n)
    )
    return Timeline(video_id=video_id, duration=float(duration), events=events)


def _with_interval(timeline: Timeline, i: int, interval: Interval) -> Timeline:
    events = list(timeline.events)
    events[i] = Event(index=events[i].index, interval=interval, caption=events[i].caption)
    return Timeline(timeline.video_id, timeline.duration, tuple(events))


def inject_overlap(rng: random.Random, timeline: Timeline) -> Timeline:
    """Pull one event's start left into its predecessor."""
    i = rng.randint(1, len(timeline.events) - 1)
    ev = timeline.events[i]
    prev = timeline.events[i - 1]
    room = ev.interval.start - prev.interval.start
    delta = room * rng.uniform(0.2, 0.8)
    return _with_interval(timeline, i, Interval(ev.interval.start - delta, ev.interval.end))


def inject_gap(rng: random.Random, timeline: Timeline, eps_cov: float = 0.5) -> Timeline:
    """Shrink one event's end enough to open a gap beyond the tolerance."""
    i = rng.randint(0, len(timeline.events) - 1)
    ev = timeline.events[i]
    length = ev.interval.length
    delta = rng.uniform(eps_cov * 1.2, max(eps_cov * 1.21, 0.9 * length))
    delta = min(delta, 0.9 * length)
    return _with_interval(timeline, i, Interval(ev.interval.start, ev.interval.end - delta))


def inject_out_of_bounds(rng: random.Random, timeline: Timeline) -> Timeline:
    """Push the first event before zero or the last past the duration."""
    delta = rng.uniform(0.1, 3.0)
    if rng.random() < 0.5:
        ev = timeline.events[0]
        return _with_interval(timeline, 0, Interval(ev.interval.start - delta, ev.interval.end))
    i = len(timeline.events) - 1
    ev = timeline.events[i]
    return _with_interval(timeline, i, Interval(ev.interval.start, ev.interval.end + delta))
