"""End-to-end dataset pipeline: filter -> validate -> judge -> mask -> emit.

One config JSON describes a run; with the replay judge and a fixed seed the
whole output tree is byte-identical across runs. Every stage conserves
records: input = kept + dropped (+ errored/quarantined), and the manifest
records the counts so conservation is auditable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import coherence as coh
from . import corpus as corp
from . import masking
from .errors import SchemaViolationError
from .jsonio import atomic_write_jsonl, atomic_write_text, dumps, iter_jsonl
from .llm import ClientConfig, LlmClient, ReplayTransport
from .timeline import ValidationPolicy

ARTIFACTS = {
    "kept": "kept.jsonl",
    "fim": "fim.jsonl",
    "droplog": "droplog.jsonl",
    "quarantine": "quarantine.jsonl",
    "stats": "stats.json",
    "manifest": "manifest.json",
}


@dataclass(frozen=True)
class PipelineConfig:
    input: str = ""
    out_dir: str = ""
    eps_cov: float = 0.5
    categories: tuple[str, ...] | None = None
    judge: str = "heuristic"  # heuristic | llm | replay
    heuristic_threshold: float = coh.HEURISTIC_THRESHOLD
    fixture: str = ""  # replay judge / replay reasoning
    endpoint: str = ""
    auth_env: str = "EVENTLINE_API_TOKEN"
    motion_manifest: str = ""
    motion_threshold: float = 0.1
    seed: int = 0
    min_events: int = masking.MIN_EVENTS_DEFAULT
    template_name: str = masking.DEFAULT_TEMPLATE.name
    reasoning: bool = False
    reasoning_mode: str = masking.MODE_SUPERVISE
    workers: int = 1

    @classmethod
    def from_json(cls, obj: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise SchemaViolationError(f"unknown config keys: {sorted(unknown)}")
        if "categories" in obj and obj["categories"] is not None:
            obj = dict(obj, categories=tuple(obj["categories"]))
        return cls(**obj)

    def with_overrides(self, pairs: list[str]) -> "PipelineConfig":
        """Apply --set key=value overrides; values parse as JSON when possible."""
        updates = {}
        known = {f.name for f in fields(self)}
        for pair in pairs:
            key, sep, raw = pair.partition("=")
            if not sep or key not in known:
                raise SchemaViolationError(f"bad override {pair!r}")
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
            if key == "categories" and value is not None:
                value = tuple(value)
            updates[key] = value
        return replace(self, **updates)

    def public_echo(self) -> dict:
        """Config fields safe to embed in the manifest (no filesystem paths)."""
        return {
            "eps_cov": self.eps_cov,
            "categories": list(self.categories) if self.categories else None,
            "judge": self.judge,
            "heuristic_threshold": self.heuristic_threshold,
            "motion_threshold": self.motion_threshold,
            "seed": self.seed,
            "min_events": self.min_events,
            "template_name": self.template_name,
            "reasoning": self.reasoning,
            "reasoning_mode": self.reasoning_mode,
            "workers": self.workers,
        }


def build_judge(config: PipelineConfig) -> coh.Judge:
    if config.judge == "heuristic":
        return coh.HeuristicJudge(threshold=config.heuristic_threshold)
    if config.judge in ("llm", "replay"):
        return coh.LlmJudge(build_client(config), judge_id=f"{config.judge}-coherence-v1")
    raise SchemaViolationError(f"unknown judge {config.judge!r}")


def build_client(config: PipelineConfig) -> LlmClient:
    client_config = ClientConfig(endpoint=config.endpoint, auth_env=config.auth_env)
    if config.judge == "replay" or (config.reasoning and config.fixture):
        return LlmClient(client_config, transport=ReplayTransport(config.fixture))
    return LlmClient(client_config)


def _filter_corpus_parallel(records, judge: coh.Judge, drop_log, workers: int):
    """filter_corpus with concurrent judging; output order and drop-log content
    match the sequential path exactly for deterministic judges."""

    def judged(record):
        try:
            return record, coh.judge_coherence(record.timeline, judge), None
        except Exception as exc:
            return record, None, f"{type(exc).__name__}: {exc}"

    for record, verdict, error in corp.parallel_map(records, judged, workers=workers):
        if error is not None:
            drop_log.append(
                coh.DropEntry(
                    video_id=record.timeline.video_id,
                    stage="coherence",
                    relevant=None,
                    rationale=error,
                    judge_id=getattr(judge, "judge_id", "unknown"),
                )
            )
        elif verdict.relevant:
            yield record
        else:
            drop_log.append(
                coh.DropEntry(
                    video_id=verdict.video_id,
                    stage="coherence",
                    relevant=False,
                    rationale=verdict.rationale,
                    judge_id=verdict.judge_id,
                )
            )


def load_motion_scores(path: str | Path) -> dict[str, float]:
    scores: dict[str, float] = {}
    for lineno, obj in iter_jsonl(path):
        try:
            record = coh.MotionRecord(str(obj["video_id"]), float(obj["motion_score"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolationError(f"motion manifest line {lineno}: {exc}") from exc
        scores[record.video_id] = record.motion_score
    return scores


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute every stage; returns the manifest that was written."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    policy = ValidationPolicy(eps_cov=config.eps_cov)

    quarantine = corp.Quarantine()
    records = list(
        corp.read_stream(
            config.input, policy=policy, categories=config.categories, quarantine=quarantine
        )
    )
    n_read = len(records)

    # motion stage: videos below the motion threshold are static, drop them
    drop_log: list[coh.DropEntry] = []
    if config.motion_manifest:
        scores = load_motion_scores(config.motion_manifest)
        moving = []
        for record in records:
            video_id = record.timeline.video_id
            score = scores.get(video_id)
            if score is not None and score < config.motion_threshold:
                drop_log.append(
                    coh.DropEntry(
                        video_id=video_id,
                        stage="motion",
                        relevant=None,
                        rationale=(
                            f"motion score {score:g} below threshold {config.motion_threshold:g}"
                        ),
                        judge_id="motion-threshold",
                    )
                )
            else:
                moving.append(record)
    else:
        moving = records
    n_motion_kept = len(moving)
    n_motion_dropped = n_read - n_motion_kept

    # coherence stage
    judge = build_judge(config)
    drops_before = len(drop_log)
    if config.workers > 1:
        kept = list(_filter_corpus_parallel(moving, judge, drop_log, config.workers))
    else:
        kept = list(coh.filter_corpus(moving, judge, drop_log))
    coherence_entries = drop_log[drops_before:]
    n_coh_dropped = sum(1 for e in coherence_entries if e.relevant is False)
    n_coh_errored = sum(1 for e in coherence_entries if e.relevant is None)

    # masking stage
    template = masking.TEMPLATES[config.template_name]
    client = build_client(config) if config.reasoning else None
    fim_rows = []
    n_skipped = 0
    for record in kept:
        timeline = record.timeline
        if len(timeline.events) < config.min_events:
            n_skipped += 1
            continue
        index = masking.sample_mask(timeline, config.seed, config.min_events)
        sample = masking.build_record(
            timeline, index, template=template, client=client, mode=config.reasoning_mode
        )
        fim_rows.append(masking.sample_to_json(sample))

    stats = corp.compute_stats(kept)

    atomic_write_jsonl(out_dir / ARTIFACTS["kept"], (r.to_json() for r in kept))
    atomic_write_jsonl(out_dir / ARTIFACTS["fim"], fim_rows)
    atomic_write_jsonl(out_dir / ARTIFACTS["droplog"], (e.to_json() for e in drop_log))
    quarantine.write(out_dir / ARTIFACTS["quarantine"])
    atomic_write_text(out_dir / ARTIFACTS["stats"], dumps(stats.to_json()) + "\n")

    manifest = {
        "config": config.public_echo(),
        "template_hash": template.hash,
        "stages": {
            "read": {"records": n_read, "quarantined": len(quarantine)},
            "motion": {"in": n_read, "kept": n_motion_kept, "dropped": n_motion_dropped},
            "coherence": {
                "in": n_motion_kept,
                "kept": len(kept),
                "dropped": n_coh_dropped,
                "errored": n_coh_errored,
            },
            "mask": {
                "in": len(kept),
                "records": len(fim_rows),
                "skipped_too_few_events": n_skipped,
            },
        },
        "artifacts": {name: filename for name, filename in ARTIFACTS.items()},
    }
    assert n_motion_kept == len(kept) + n_coh_dropped + n_coh_errored
    assert len(kept) == len(fim_rows) + n_skipped
    atomic_write_text(
        out_dir / ARTIFACTS["manifest"], json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    return manifest
