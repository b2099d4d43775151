"""
Validating and repairing event timelines
========================================

A timeline is a video's ordered list of captioned events. A good one tiles
the whole video: no overlaps, no holes, everything inside [0, duration].
"""

from eventline import Event, Interval, Timeline, ValidationPolicy, normalize, validate
from eventline.timeline import coverage_ratio, event_density

# A clean 30-second timeline: three events, exact tiling.
clean = Timeline(
    video_id="demo-001",
    duration=30.0,
    events=(
        Event(0, Interval(0.0, 12.0), "cracking eggs into a bowl"),
        Event(1, Interval(12.0, 21.0), "whisking the eggs"),
        Event(2, Interval(21.0, 30.0), "pouring eggs into the pan"),
    ),
)
print("clean timeline ok?", validate(clean).ok)
print("coverage:", coverage_ratio(clean))
print("events/minute:", event_density(clean))

# Now a messy candidate, the kind a model actually emits: the first event
# starts before zero, the second overlaps the third, and a small gap is left
# before the last event.
messy_events = (
    Event(0, Interval(-0.8, 10.0), "cracking eggs into a bowl"),
    Event(1, Interval(10.0, 22.5), "whisking the eggs"),
    Event(2, Interval(21.0, 29.7), "pouring eggs into the pan"),
)
messy = Timeline("demo-002", 30.0, messy_events)

report = validate(messy)
print("\nmessy timeline violations:")
for violation in report.violations:
    print(f"  {violation.kind.value:12s} events={violation.indices} size={violation.magnitude:.2f}s")

# normalize applies the documented repairs: clamp to bounds, truncate the
# earlier of two overlapping events, close sub-tolerance gaps.
repaired = normalize(list(messy_events), 30.0, ValidationPolicy(eps_cov=0.5), video_id="demo-002")
print("\nafter normalize:")
for event in repaired.events:
    print(f"  [{event.interval}] {event.caption}")
print("repaired ok?", validate(repaired).ok)
