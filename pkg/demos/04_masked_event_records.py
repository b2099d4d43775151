"""
Masked-event training records
=============================

One event of a dense timeline is hidden; the model must infer what happened
in the masked window from the surrounding events. The builder keeps the
window visible (only the caption is withheld), renders a prompt/answer pair,
and can attach step-by-step reasoning from a judging model.
"""

import json

from eventline import Event, Interval, Timeline, mask_event, reconstruct, render, sample_mask
from eventline.masking import sample_to_json

timeline = Timeline(
    video_id="recipe-007",
    duration=60.0,
    events=(
        Event(0, Interval(0.0, 15.0), "laying out wrappers and filling"),
        Event(1, Interval(15.0, 34.0), "rolling the wrappers around the filling"),
        Event(2, Interval(34.0, 47.0), "heating oil in a wok"),
        Event(3, Interval(47.0, 60.0), "frying the rolls until golden"),
    ),
)

# Deterministic choice of what to hide: same timeline + seed -> same index.
index = sample_mask(timeline, seed=7)
print("masked index:", index)

sample = render(mask_event(timeline, index))
print("\nprompt:")
print(sample.prompt_text)
print("answer:", sample.answer_text)
print("template hash:", sample.template_hash)

# The hidden caption never leaks into the prompt.
assert sample.target_caption not in sample.prompt_text

# Reinserting the masked event reproduces the source timeline exactly.
assert reconstruct(sample) == timeline
print("\nround trip ok")

# The JSONL record written to training files:
print("\nrecord:")
print(json.dumps(sample_to_json(sample), indent=2)[:400], "...")
