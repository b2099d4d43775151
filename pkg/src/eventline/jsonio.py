"""JSON serialization helpers and atomic file writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import IoFailureError, SchemaViolationError


def canonical_dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, compact separators, no trailing newline.

    This is the normalization the host bindings compare against byte-for-byte.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ": "), ensure_ascii=False)


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a sibling temp file + rename so readers never see a torn file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_jsonl(path: str | Path, rows: Iterable[dict]) -> int:
    """Write one JSON object per line atomically; returns the row count."""
    lines = []
    for row in rows:
        lines.append(dumps(row))
    text = "\n".join(lines)
    if lines:
        text += "\n"
    atomic_write_text(path, text)
    return len(lines)


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (1-based line number, parsed object) per non-blank line.

    Raises IoFailureError if the file cannot be opened and SchemaViolationError
    for lines that are not JSON objects.
    """
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
            except json.JSONDecodeError as exc:
                raise SchemaViolationError(f"line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise SchemaViolationError(f"line {lineno}: expected a JSON object")
            yield lineno, obj
