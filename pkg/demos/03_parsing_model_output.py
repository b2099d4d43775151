"""
Parsing timestamped events out of free-form model output
========================================================

Models interleave prose with event lines, repeat themselves, and mix clock
and decimal time forms. The parser is line-oriented and total: every line
either yields an event or a diagnostic, and nothing ever aborts.
"""

from eventline import parse_events, parse_single_window
from eventline.parsing import render_timeline_text, timeline_from_text

MODEL_OUTPUT = """\
Here is the breakdown of the cooking video:

161.00 - 183.00: filling and wrapping spring rolls
185.00 - 205.00: placing the spring rolls into oil for frying
then they fry everything
From 205.00 to 231.50, turning the rolls until golden
01:30 - 02:00: mixing batter
185.00 - 205.00: placing the spring rolls into oil for frying
from 250 to 240 seconds: impossible rewound line
"""

events, diagnostics = parse_events(MODEL_OUTPUT)
print("events:")
for event in events:
    print(f"  [{event.interval}] {event.caption!r}")

print("\ndiagnostics:")
for entry in diagnostics.entries:
    print(f"  line {entry.line}: {entry.kind.value} ({entry.message})")

# A whole answer can be packed into a Timeline in one call.
timeline, _ = timeline_from_text(MODEL_OUTPUT, video_id="cooking-042", duration=240.0)
print("\nas a timeline:", len(timeline.events), "events")

# The canonical rendering round-trips through the parser exactly.
print("\ncanonical form:")
print(render_timeline_text(timeline))

# Grounding answers are usually one window wrapped in prose.
window = parse_single_window("The event occurs from 185.00 to 205.00.")
print("\nextracted window:", window)
