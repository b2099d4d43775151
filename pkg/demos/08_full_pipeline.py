"""
The full dataset pipeline, end to end
=====================================

filter motion -> validate -> judge caption coherence -> mask an event ->
emit training records. One config describes the run; with the replay judge
and a fixed seed, two runs produce byte-identical output trees.
"""

import json
import random
import tempfile
from pathlib import Path

from eventline.coherence import coherence_request
from eventline.corpus import CorpusRecord
from eventline.llm import request_hash
from eventline.pipeline import PipelineConfig, run_pipeline
from eventline.timeline import Event, Interval, Timeline

rng = random.Random(4)
workdir = Path(tempfile.mkdtemp(prefix="eventline-demo-"))

# Ten synthetic videos; each tiles its duration with 4-8 events.
records = []
for i in range(10):
    duration = rng.randrange(40, 120)
    n = rng.randrange(4, 9)
    cuts = sorted(rng.sample(range(1, duration), n - 1))
    edges = [0.0, *map(float, cuts), float(duration)]
    events = tuple(
        Event(k, Interval(edges[k], edges[k + 1]), f"scene {k} of video {i}") for k in range(n)
    )
    timeline = Timeline(f"vid{i:03d}", float(duration), events)
    records.append(CorpusRecord(timeline, ["cooking", "travel", "diy"][i % 3]))

corpus = workdir / "corpus.jsonl"
corpus.write_text("".join(json.dumps(r.to_json()) + "\n" for r in records))

# Motion manifest: one video is static and will be dropped.
scores = workdir / "scores.jsonl"
scores.write_text(
    "".join(
        json.dumps({"video_id": r.timeline.video_id, "motion_score": 0.02 if i == 0 else 0.6})
        + "\n"
        for i, r in enumerate(records)
    )
)

# Replay fixture: canned judge responses keyed by request hash. Video 5 is
# judged incoherent; everything else passes.
responses = {}
for i, record in enumerate(records):
    decision = "no" if i == 5 else "yes"
    responses[request_hash(coherence_request(record.timeline))] = (
        f"1. scripted demo review\nDecision: {decision}"
    )
fixture = workdir / "fixture.json"
fixture.write_text(json.dumps({"version": 1, "responses": responses}))

config = PipelineConfig(
    input=str(corpus),
    out_dir=str(workdir / "out"),
    motion_manifest=str(scores),
    motion_threshold=0.1,
    judge="replay",
    fixture=str(fixture),
    seed=7,
)
manifest = run_pipeline(config)

print("stage counts:")
for stage, counts in manifest["stages"].items():
    print(f"  {stage:10s} {counts}")
print("\nartifacts in", config.out_dir)
for name in sorted(Path(config.out_dir).iterdir()):
    print(f"  {name.name:16s} {name.stat().st_size:6d} bytes")

fim_first = json.loads((Path(config.out_dir) / "fim.jsonl").read_text().splitlines()[0])
print("\nfirst training record target:", fim_first["target"])
print("masked window:", fim_first["window"])
