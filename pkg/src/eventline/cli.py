"""Command-line front end; every subcommand is a thin shell over the library.

Exit codes: 0 success, 1 validation/library failures, 2 usage errors.
Artifacts are written atomically (temp file + rename). Reports print as
human-readable lines unless --json is set.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import coherence as coh
from . import corpus as corp
from . import framegrid as fg
from . import masking
from .bindings import bind, error_object
from .errors import EventlineError
from .jsonio import atomic_write_jsonl, atomic_write_text, canonical_dumps, dumps, iter_jsonl
from .metrics import (
    DEFAULT_HIT_IOU,
    DEFAULT_RECALL_THRESHOLDS,
    grounding_eval,
    grounding_samples_from_rows,
    highlight_eval,
    highlight_samples_from_rows,
)
from .parsing import events_from_parsed, parse_events
from .masking import MIN_EVENTS_DEFAULT
from .pipeline import PipelineConfig, build_client, build_judge, load_motion_scores, run_pipeline
from .timeline import Timeline, ValidationPolicy, timeline_to_json


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(dumps(report))
        return
    for key, value in report.items():
        print(f"{key}: {json.dumps(value) if isinstance(value, (dict, list)) else value}")


def _read_rows(path: str) -> list[dict]:
    return [obj for _, obj in iter_jsonl(path)]


def _categories_arg(raw: str | None) -> tuple[str, ...] | None:
    if raw is None:
        return None
    return tuple(c.strip() for c in raw.split(",") if c.strip())


def _policy_arg(args) -> ValidationPolicy:
    """--policy takes inline JSON or a JSON file path; --eps-cov is shorthand."""
    raw = getattr(args, "policy", None)
    if not raw:
        return ValidationPolicy(eps_cov=args.eps_cov)
    text = Path(raw).read_text(encoding="utf-8") if Path(raw).is_file() else raw
    try:
        obj = json.loads(text)
        return ValidationPolicy(**obj)
    except (json.JSONDecodeError, TypeError) as exc:
        raise EventlineError(f"bad --policy value {raw!r}: {exc}") from None


def _cmd_validate_corpus(args) -> int:
    policy = _policy_arg(args)
    stats, rejects, violation_counts, invalid = corp.scan_corpus(
        args.input,
        policy=policy,
        categories=_categories_arg(args.categories),
        workers=args.workers,
        validate_only=True,
    )
    if args.quarantine:
        atomic_write_jsonl(args.quarantine, (e.to_json() for e in rejects))
    report = {
        "records": stats.video_count,
        "invalid_records": invalid,
        "violation_counts": dict(sorted(violation_counts.items())),
        "quarantined": len(rejects),
    }
    _emit(report, args.json)
    return 1 if invalid or rejects else 0


def _cmd_stats(args) -> int:
    policy = None if args.no_validate else _policy_arg(args)
    stats, rejects, _, _ = corp.scan_corpus(
        args.input,
        policy=policy,
        categories=_categories_arg(args.categories),
        workers=args.workers,
    )
    if args.quarantine:
        atomic_write_jsonl(args.quarantine, (e.to_json() for e in rejects))
    report = stats.to_json()
    report["quarantined"] = len(rejects)
    if args.out:
        atomic_write_text(args.out, dumps(report) + "\n")
    _emit(report, args.json)
    return 0


def _cmd_partition(args) -> int:
    quarantine = corp.Quarantine()
    records = corp.read_stream(args.input, policy=_policy_arg(args), quarantine=quarantine)
    categories = _categories_arg(args.categories) or corp.DEFAULT_CATEGORIES
    shards = corp.partition_by_category(records, args.out_dir, categories, quarantine)
    if args.quarantine:
        quarantine.write(args.quarantine)
    report = {
        "shards": {cat: str(path) for cat, path in sorted(shards.items())},
        "quarantined": len(quarantine),
    }
    _emit(report, args.json)
    return 0


def _cmd_filter_motion(args) -> int:
    scores = load_motion_scores(args.scores)
    quarantine = corp.Quarantine()
    kept_rows = []
    drop_log: list[coh.DropEntry] = []
    for record in corp.read_stream(args.input, policy=None, quarantine=quarantine):
        video_id = record.timeline.video_id
        score = scores.get(video_id)
        if score is not None and score < args.threshold:
            drop_log.append(
                coh.DropEntry(
                    video_id=video_id,
                    stage="motion",
                    relevant=None,
                    rationale=f"motion score {score:g} below threshold {args.threshold:g}",
                    judge_id="motion-threshold",
                )
            )
        else:
            kept_rows.append(record.to_json())
    atomic_write_jsonl(args.out, kept_rows)
    if args.droplog:
        atomic_write_jsonl(args.droplog, (e.to_json() for e in drop_log))
    _emit({"kept": len(kept_rows), "dropped": len(drop_log), "quarantined": len(quarantine)}, args.json)
    return 0


def _cmd_filter_coherence(args) -> int:
    config = PipelineConfig(
        judge=args.judge,
        heuristic_threshold=args.threshold,
        fixture=args.fixture or "",
        endpoint=args.endpoint or "",
    )
    judge = build_judge(config)
    quarantine = corp.Quarantine()
    records = corp.read_stream(args.input, policy=None, quarantine=quarantine)
    drop_log: list[coh.DropEntry] = []
    kept_rows = [r.to_json() for r in coh.filter_corpus(records, judge, drop_log)]
    atomic_write_jsonl(args.out, kept_rows)
    if args.droplog:
        atomic_write_jsonl(args.droplog, (e.to_json() for e in drop_log))
    report = {
        "kept": len(kept_rows),
        "dropped": sum(1 for e in drop_log if e.relevant is False),
        "errored": sum(1 for e in drop_log if e.relevant is None),
        "quarantined": len(quarantine),
    }
    _emit(report, args.json)
    return 0


def _mask_rows(args, render_records: bool, client=None, mode=masking.MODE_SUPERVISE):
    quarantine = corp.Quarantine()
    rows = []
    skipped = 0
    template = masking.TEMPLATES[args.template]
    for record in corp.read_stream(args.input, quarantine=quarantine):
        timeline = record.timeline
        if len(timeline.events) < args.min_events:
            skipped += 1
            continue
        index = masking.sample_mask(timeline, args.seed, args.min_events)
        if render_records:
            sample = masking.build_record(timeline, index, template=template, client=client, mode=mode)
        else:
            sample = masking.mask_event(timeline, index, args.min_events)
        rows.append(masking.sample_to_json(sample))
    return rows, skipped, quarantine


def _cmd_mask(args) -> int:
    rows, skipped, quarantine = _mask_rows(args, render_records=False)
    atomic_write_jsonl(args.out, rows)
    _emit({"samples": len(rows), "skipped": skipped, "quarantined": len(quarantine)}, args.json)
    return 0


def _cmd_build_fim(args) -> int:
    client = None
    if args.judge != "none":
        config = PipelineConfig(
            judge=args.judge, fixture=args.fixture or "", endpoint=args.endpoint or "",
            reasoning=True,
        )
        client = build_client(config)
    rows, skipped, quarantine = _mask_rows(args, render_records=True, client=client, mode=args.mode)
    atomic_write_jsonl(args.out, rows)
    _emit({"records": len(rows), "skipped": skipped, "quarantined": len(quarantine)}, args.json)
    return 0


def _cmd_parse(args) -> int:
    text = Path(args.input).read_text(encoding="utf-8") if args.input else sys.stdin.read()
    parsed, diagnostics = parse_events(text)
    timeline = Timeline(
        video_id=args.video_id, duration=args.duration, events=events_from_parsed(parsed)
    )
    print(dumps(timeline_to_json(timeline)))
    for entry in diagnostics.entries:
        print(dumps(entry.to_json()), file=sys.stderr)
    return 0


def _cmd_compose_grid(args) -> int:
    paths = [Path(p) for p in args.frames]
    if len(paths) == 1 and paths[0].is_dir():
        paths = sorted(paths[0].glob("*.ppm"))
    frames = [fg.read_ppm(p) for p in paths]
    if not frames:
        raise EventlineError("no frames supplied")
    duration = args.duration if args.duration else (len(frames) + 0.5) / args.fps
    plan = fg.plan_grid(
        duration,
        fps=args.fps,
        cols=args.cols,
        frame_size=(frames[0].width, frames[0].height),
        label_mode=args.label_mode,
    )
    composite = fg.compose_grid(frames, plan)
    fg.write_ppm(args.out, composite)
    _emit(
        {
            "frames": len(frames),
            "cols": plan.cols,
            "rows": plan.rows,
            "composite": list(plan.composite_size),
            "out": args.out,
        },
        args.json,
    )
    return 0


def _cmd_eval_grounding(args) -> int:
    thresholds = tuple(float(t) for t in args.thresholds.split(","))
    samples = grounding_samples_from_rows(_read_rows(args.pred), _read_rows(args.gt))
    summary = grounding_eval(samples, thresholds)
    report = summary.to_json()
    if args.out:
        atomic_write_text(args.out, dumps(report) + "\n")
    _emit(report, args.json)
    return 0


def _cmd_eval_highlight(args) -> int:
    samples = highlight_samples_from_rows(_read_rows(args.pred), _read_rows(args.gt))
    summary = highlight_eval(samples, hit_iou=args.hit_iou)
    report = summary.to_json()
    if args.out:
        atomic_write_text(args.out, dumps(report) + "\n")
    _emit(report, args.json)
    return 0


def _cmd_pipeline(args) -> int:
    config_obj = json.loads(Path(args.config).read_text(encoding="utf-8"))
    config = PipelineConfig.from_json(config_obj)
    if args.set:
        config = config.with_overrides(args.set)
    overrides = {}
    if args.judge:
        overrides["judge"] = args.judge
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        config = PipelineConfig.from_json({**_config_as_dict(config), **overrides})
    manifest = run_pipeline(config)
    _emit(manifest, args.json)
    return 0


def _config_as_dict(config: PipelineConfig) -> dict:
    from dataclasses import asdict

    obj = asdict(config)
    if obj.get("categories") is not None:
        obj["categories"] = list(obj["categories"])
    return obj


def _cmd_bind(args) -> int:
    from .bindings import OPS
    from .errors import UnknownOperationError

    if args.op not in OPS:
        error = UnknownOperationError(
            f"unknown operation {args.op!r}; expected one of {sorted(OPS)}"
        )
        print(canonical_dumps(error_object(error)))
        return 2
    status = 0
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
            result = bind(args.op, payload)
        except Exception as exc:
            result = error_object(exc)
            status = 1
        print(canonical_dumps(result))
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eventline", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
        return p

    p = common(sub.add_parser("validate-corpus", help="validate every record's timeline"))
    p.add_argument("--input", required=True)
    p.add_argument("--eps-cov", type=float, default=0.5)
    p.add_argument("--policy", default=None, help="policy JSON (inline or file path)")
    p.add_argument("--categories", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quarantine", default=None)
    p.set_defaults(func=_cmd_validate_corpus)

    p = common(sub.add_parser("stats", help="corpus statistics"))
    p.add_argument("--input", required=True)
    p.add_argument("--eps-cov", type=float, default=0.5)
    p.add_argument("--policy", default=None, help="policy JSON (inline or file path)")
    p.add_argument("--no-validate", action="store_true")
    p.add_argument("--categories", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quarantine", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_stats)

    p = common(sub.add_parser("partition", help="split a corpus into per-category shards"))
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--eps-cov", type=float, default=0.5)
    p.add_argument("--policy", default=None, help="policy JSON (inline or file path)")
    p.add_argument("--categories", default=None)
    p.add_argument("--quarantine", default=None)
    p.set_defaults(func=_cmd_partition)

    p = common(sub.add_parser("filter-motion", help="drop near-static videos"))
    p.add_argument("--input", required=True)
    p.add_argument("--scores", required=True, help="JSONL of {video_id, motion_score}")
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.add_argument("--droplog", default=None)
    p.set_defaults(func=_cmd_filter_motion)

    p = common(sub.add_parser("filter-coherence", help="drop videos with unrelated captions"))
    p.add_argument("--input", required=True)
    p.add_argument("--judge", choices=("heuristic", "llm", "replay"), default="heuristic")
    p.add_argument("--threshold", type=float, default=coh.HEURISTIC_THRESHOLD)
    p.add_argument("--fixture", default=None)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--droplog", default=None)
    p.set_defaults(func=_cmd_filter_coherence)

    p = common(sub.add_parser("mask", help="emit masked samples without prompts"))
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-events", type=int, default=MIN_EVENTS_DEFAULT)
    p.add_argument("--template", default=masking.DEFAULT_TEMPLATE.name)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mask)

    p = common(sub.add_parser("build-fim", help="emit rendered masked-event training records"))
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-events", type=int, default=MIN_EVENTS_DEFAULT)
    p.add_argument("--template", default=masking.DEFAULT_TEMPLATE.name)
    p.add_argument("--judge", choices=("none", "llm", "replay"), default="none")
    p.add_argument("--fixture", default=None)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--mode", choices=(masking.MODE_SUPERVISE, masking.MODE_PSEUDO_LABEL),
                   default=masking.MODE_SUPERVISE)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_fim)

    p = common(sub.add_parser("parse", help="parse timestamped events from text"))
    p.add_argument("--video-id", required=True)
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--input", default=None, help="file to read; stdin when omitted")
    p.set_defaults(func=_cmd_parse)

    p = common(sub.add_parser("compose-grid", help="tile frames into a marked composite"))
    p.add_argument("--frames", nargs="+", required=True, help="PPM files or one directory")
    p.add_argument("--fps", type=float, default=fg.DEFAULT_FPS)
    p.add_argument("--cols", type=int, default=4)
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--label-mode", choices=(fg.LABEL_TIMESTAMP, fg.LABEL_INDEX),
                   default=fg.LABEL_TIMESTAMP)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compose_grid)

    p = common(sub.add_parser("eval-grounding", help="mIoU and R@1 over prediction/GT files"))
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--thresholds", default=",".join(str(t) for t in DEFAULT_RECALL_THRESHOLDS))
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eval_grounding)

    p = common(sub.add_parser("eval-highlight", help="mAP and HIT@1 over prediction/GT files"))
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--hit-iou", type=float, default=DEFAULT_HIT_IOU)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eval_highlight)

    p = common(sub.add_parser("pipeline", help="run the full dataset pipeline from a config"))
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--judge", choices=("heuristic", "llm", "replay"), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("bind", help="run one bound operation over JSONL on stdin")
    p.add_argument("op")
    p.set_defaults(func=_cmd_bind)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EventlineError as exc:
        print(f"error[{exc.kind}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[Io]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
