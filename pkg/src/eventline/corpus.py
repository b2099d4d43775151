"""Streaming JSONL corpus I/O, statistics, and category bookkeeping.

Corpora never fit in memory: readers are generators, statistics are a
single-pass fold, and the fold state is built from integers (centiseconds,
parts-per-billion) so partial results merge exactly. Exact merging is what
makes `--workers N` produce byte-identical reports for every N: float
accumulation would drift with the chunking, integer accumulation cannot.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .errors import IoFailureError, SchemaViolationError, ZeroDurationError
from .jsonio import atomic_write_jsonl, dumps
from .timeline import (
    DEFAULT_POLICY,
    ValidationPolicy,
    coverage_ratio,
    timeline_from_json,
    timeline_to_json,
    validate,
)

DEFAULT_CATEGORIES = (
    "travel",
    "diy",
    "tech review",
    "cooking",
    "sports",
    "gaming",
    "education",
    "vlog",
    "news",
    "music",
)

DENSE_COVERAGE_CUTOFF = 0.9
_PPB = 10**9


@dataclass(frozen=True)
class CorpusRecord:
    timeline: Timeline
    category: str
    source: str | None = None
    reasoning: tuple[str, ...] | None = None

    def to_json(self) -> dict:
        obj = timeline_to_json(self.timeline)
        obj["category"] = self.category
        if self.source is not None:
            obj["source"] = self.source
        if self.reasoning is not None:
            obj["reasoning"] = list(self.reasoning)
        return obj


def record_from_json(obj: dict) -> CorpusRecord:
    timeline = timeline_from_json(obj)
    category = obj.get("category")
    if not isinstance(category, str) or not category:
        raise SchemaViolationError("record needs a non-empty 'category'")
    source = obj.get("source")
    if source is not None and not isinstance(source, str):
        raise SchemaViolationError("'source' must be a string")
    reasoning = obj.get("reasoning")
    if reasoning is not None:
        if not isinstance(reasoning, list) or not all(isinstance(s, str) for s in reasoning):
            raise SchemaViolationError("'reasoning' must be a list of strings")
        reasoning = tuple(reasoning)
    return CorpusRecord(timeline=timeline, category=category, source=source, reasoning=reasoning)


@dataclass(frozen=True)
class QuarantineEntry:
    line: int
    error: str
    raw: str = ""

    def to_json(self) -> dict:
        return {"line": self.line, "error": self.error, "raw": self.raw}


class Quarantine:
    """Collects rejected lines; written out as JSONL by the caller."""

    def __init__(self):
        self.entries: list[QuarantineEntry] = []

    def add(self, line: int, error: str, raw: str = "") -> None:
        self.entries.append(QuarantineEntry(line=line, error=error, raw=raw))

    def __len__(self) -> int:
        return len(self.entries)

    def write(self, path: str | Path) -> int:
        return atomic_write_jsonl(path, (e.to_json() for e in self.entries))


def _check_record(
    record: CorpusRecord,
    policy: ValidationPolicy | None,
    categories: tuple[str, ...] | None,
) -> str | None:
    """Reason the record should be quarantined, or None if it is clean."""
    if categories is not None and record.category not in categories:
        return f"UnknownCategory: {record.category!r}"
    if policy is not None:
        report = validate(record.timeline, policy)
        if not report.ok:
            kinds = ",".join(sorted({v.kind.value for v in report.violations}))
            return f"InvalidTimeline: {kinds}"
    return None


def read_stream(
    path: str | Path,
    *,
    policy: ValidationPolicy | None = DEFAULT_POLICY,
    categories: tuple[str, ...] | None = None,
    quarantine: Quarantine | None = None,
) -> Iterator[CorpusRecord]:
    """Yield records lazily; malformed or invalid lines go to the quarantine.

    Never materializes the corpus. Pass policy=None to skip timeline
    validation and categories=None to accept any category string.
    """
    if quarantine is None:
        quarantine = Quarantine()
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot open {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise SchemaViolationError("line is not a JSON object")
                record = record_from_json(obj)
            except (json.JSONDecodeError, SchemaViolationError, ValueError) as exc:
                quarantine.add(lineno, f"SchemaViolation: {exc}", raw=line.rstrip("\n")[:500])
                continue
            reason = _check_record(record, policy, categories)
            if reason is not None:
                quarantine.add(lineno, reason, raw=line.rstrip("\n")[:500])
                continue
            yield record


# --- statistics ---------------------------------------------------------------


@dataclass
class StatsAccumulator:
    """Exact, mergeable fold state: integers only, so merging is associative."""

    video_count: int = 0
    event_count: int = 0
    duration_cs: int = 0
    coverage_ppb: int = 0
    category_counts: Counter = field(default_factory=Counter)
    caption_tokens: Counter = field(default_factory=Counter)
    violation_counts: Counter = field(default_factory=Counter)
    invalid_records: int = 0

    def add(self, record: CorpusRecord) -> None:
        timeline = record.timeline
        self.video_count += 1
        self.event_count += len(timeline.events)
        self.duration_cs += round(timeline.duration * 100)
        try:
            self.coverage_ppb += round(coverage_ratio(timeline) * _PPB)
        except ZeroDurationError:
            pass
        self.category_counts[record.category] += 1
        for event in timeline.events:
            self.caption_tokens[len(event.caption.split())] += 1

    def merge(self, other: "StatsAccumulator") -> None:
        self.video_count += other.video_count
        self.event_count += other.event_count
        self.duration_cs += other.duration_cs
        self.coverage_ppb += other.coverage_ppb
        self.category_counts.update(other.category_counts)
        self.caption_tokens.update(other.caption_tokens)
        self.violation_counts.update(other.violation_counts)
        self.invalid_records += other.invalid_records

    def finalize(self) -> "CorpusStats":
        n = self.video_count
        total_seconds = self.duration_cs / 100.0
        mean_coverage = (self.coverage_ppb / n) / _PPB if n else 0.0
        return CorpusStats(
            video_count=n,
            total_hours=total_seconds / 3600.0 if n else 0.0,
            events_per_video_mean=self.event_count / n if n else 0.0,
            events_per_minute_mean=(
                self.event_count / (total_seconds / 60.0) if total_seconds > 0 else 0.0
            ),
            mean_coverage=mean_coverage,
            coverage_class="Dense" if n and mean_coverage >= DENSE_COVERAGE_CUTOFF else "Sparse",
            per_category_counts=dict(sorted(self.category_counts.items())),
            caption_length_histogram={k: self.caption_tokens[k] for k in sorted(self.caption_tokens)},
        )


@dataclass(frozen=True)
class CorpusStats:
    video_count: int
    total_hours: float
    events_per_video_mean: float
    events_per_minute_mean: float
    mean_coverage: float
    coverage_class: str
    per_category_counts: dict[str, int]
    caption_length_histogram: dict[int, int]

    def to_json(self) -> dict:
        return {
            "video_count": self.video_count,
            "total_hours": round(self.total_hours, 9),
            "events_per_video_mean": round(self.events_per_video_mean, 9),
            "events_per_minute_mean": round(self.events_per_minute_mean, 9),
            "mean_coverage": round(self.mean_coverage, 9),
            "coverage_class": self.coverage_class,
            "per_category_counts": self.per_category_counts,
            "caption_length_histogram": {str(k): v for k, v in self.caption_length_histogram.items()},
        }


def compute_stats(records: Iterable[CorpusRecord]) -> CorpusStats:
    """Single-pass corpus statistics."""
    acc = StatsAccumulator()
    for record in records:
        acc.add(record)
    return acc.finalize()


# --- chunked parallel scan ----------------------------------------------------
# The file is split into newline-aligned byte spans; each worker opens the
# file itself and folds its span, so only offsets cross the process boundary.
# Fold states are integers, so merging spans in file order yields the same
# bytes for every worker count and span size.


def _file_spans(path: str | Path, span_bytes: int) -> list[tuple[int, int]]:
    """Newline-aligned (start, end) byte ranges covering the file."""
    try:
        size = os.path.getsize(path)
        spans: list[tuple[int, int]] = []
        with open(path, "rb") as fh:
            start = 0
            while start < size:
                end = min(size, start + span_bytes)
                if end < size:
                    fh.seek(end)
                    fh.readline()  # advance to the end of the straddled line
                    end = fh.tell()
                spans.append((start, end))
                start = end
        return spans
    except OSError as exc:
        raise IoFailureError(f"cannot open {path}: {exc}") from exc


def _scan_span(
    args: tuple[str, int, int, float | None, tuple[str, ...] | None, bool],
) -> tuple[StatsAccumulator, list[QuarantineEntry], int]:
    """Fold one byte span; quarantine line numbers are span-relative (0-based)."""
    path, start, end, eps_cov, categories, validate_only = args
    policy = ValidationPolicy(eps_cov=eps_cov) if eps_cov is not None else None
    acc = StatsAccumulator()
    rejects: list[QuarantineEntry] = []
    with open(path, "rb") as fh:
        fh.seek(start)
        data = fh.read(end - start)
    lines = data.decode("utf-8").splitlines()
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise SchemaViolationError("line is not a JSON object")
            record = record_from_json(obj)
        except (json.JSONDecodeError, SchemaViolationError, ValueError) as exc:
            rejects.append(QuarantineEntry(i, f"SchemaViolation: {exc}", raw=line[:500]))
            continue
        if categories is not None and record.category not in categories:
            rejects.append(
                QuarantineEntry(i, f"UnknownCategory: {record.category!r}", raw=line[:500])
            )
            continue
        if policy is not None:
            report = validate(record.timeline, policy)
            if not report.ok:
                acc.invalid_records += 1
                for violation in report.violations:
                    acc.violation_counts[violation.kind.value] += 1
                if validate_only:
                    acc.video_count += 1  # counted; reported through violation_counts
                else:
                    kinds = ",".join(sorted({v.kind.value for v in report.violations}))
                    rejects.append(QuarantineEntry(i, f"InvalidTimeline: {kinds}", raw=line[:500]))
                continue
        if validate_only:
            acc.video_count += 1
        else:
            acc.add(record)
    return acc, rejects, len(lines)


def scan_corpus(
    path: str | Path,
    *,
    policy: ValidationPolicy | None = DEFAULT_POLICY,
    categories: tuple[str, ...] | None = None,
    workers: int = 1,
    span_bytes: int = 2 << 20,
    validate_only: bool = False,
) -> tuple[CorpusStats, list[QuarantineEntry], Counter, int]:
    """Scan a corpus file: stats + quarantine + violation-kind counts.

    workers > 1 fans byte spans out to processes; the folded result is
    identical to the sequential scan for any worker count and span size.
    """
    eps = policy.eps_cov if policy is not None else None
    path = os.fspath(path)
    spans = _file_spans(path, span_bytes)
    jobs = [(path, start, end, eps, categories, validate_only) for start, end in spans]
    total = StatsAccumulator()
    rejects: list[QuarantineEntry] = []
    base_lineno = 1
    if workers <= 1:
        results = map(_scan_span, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_scan_span, jobs)
    for acc, span_rejects, span_lines in results:
        total.merge(acc)
        rejects.extend(
            QuarantineEntry(base_lineno + e.line, e.error, e.raw) for e in span_rejects
        )
        base_lineno += span_lines
    if workers > 1:
        pool.shutdown()
    return total.finalize(), rejects, total.violation_counts, total.invalid_records


# --- partitioning ---------------------------------------------------------------


def partition_by_category(
    records: Iterable[CorpusRecord],
    out_dir: str | Path,
    categories: tuple[str, ...] = DEFAULT_CATEGORIES,
    quarantine: Quarantine | None = None,
) -> dict[str, Path]:
    """Write one JSONL shard per category seen; unknown categories quarantine.

    Records keep their input order inside each shard. Shards are written
    via temp files and renamed at the end, so interrupted runs leave no
    half-written shard behind.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if quarantine is None:
        quarantine = Quarantine()
    buffers: dict[str, list[str]] = {}
    for i, record in enumerate(records, start=1):
        if record.category not in categories:
            quarantine.add(i, f"UnknownCategory: {record.category!r}", raw=record.timeline.video_id)
            continue
        buffers.setdefault(record.category, []).append(dumps(record.to_json()))
    shards: dict[str, Path] = {}
    for category, lines in buffers.items():
        shard = out_dir / f"{category.replace(' ', '_')}.jsonl"
        tmp = shard.with_suffix(".jsonl.tmp")
        tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
        os.replace(tmp, shard)
        shards[category] = shard
    return shards


# --- order-preserving parallel map ---------------------------------------------


@dataclass(frozen=True)
class MapError:
    index: int
    message: str

    def to_json(self) -> dict:
        return {"index": self.index, "error": self.message}


def parallel_map(
    items: Iterable,
    worker_fn: Callable,
    workers: int = 1,
    errors: list[MapError] | None = None,
) -> Iterator:
    """Apply worker_fn to each item; output order equals input order.

    A failing item never halts the stream: it is skipped and recorded in
    `errors`. Thread-based, intended for I/O-bound work (upstream calls);
    results are independent of the worker count because worker_fn is pure
    and the merge is ordered.
    """
    if errors is None:
        errors = []
    if workers <= 1:
        for i, item in enumerate(items):
            try:
                yield worker_fn(item)
            except Exception as exc:
                errors.append(MapError(i, f"{type(exc).__name__}: {exc}"))
        return

    with ThreadPoolExecutor(max_workers=workers) as pool:
        window = workers * 4
        pending: dict = {}
        iterator = enumerate(items)
        next_emit = 0
        done_results: dict[int, tuple[bool, object]] = {}
        exhausted = False
        while True:
            while not exhausted and len(pending) + len(done_results) < window:
                try:
                    i, item = next(iterator)
                except StopIteration:
                    exhausted = True
                    break
                pending[pool.submit(worker_fn, item)] = i
            if not pending and exhausted and not done_results:
                return
            if pending:
                finished, _ = wait(pending, return_when=FIRST_COMPLETED)
                for future in finished:
                    i = pending.pop(future)
                    try:
                        done_results[i] = (True, future.result())
                    except Exception as exc:
                        done_results[i] = (False, MapError(i, f"{type(exc).__name__}: {exc}"))
            while next_emit in done_results:
                ok, value = done_results.pop(next_emit)
                if ok:
                    yield value
                else:
                    errors.append(value)
                next_emit += 1
