"""Canonical-JSON operation dispatch for host-language bindings.

Each exposed operation takes one JSON payload and returns one JSON object,
numerically identical to calling the library directly. Errors surface as
{"error": {"kind", "message"}} objects carrying the library's error kinds,
so bindings in any language can re-raise them faithfully.
"""

from __future__ import annotations

from .errors import EventlineError, SchemaViolationError, UnknownOperationError
from .metrics import (
    DEFAULT_HIT_IOU,
    DEFAULT_RECALL_THRESHOLDS,
    GroundingSample,
    HighlightSample,
    ScoredWindow,
    grounding_eval,
    highlight_eval,
    iou,
)
from .parsing import parse_events, parse_single_window
from .timeline import (
    Interval,
    ValidationPolicy,
    normalize,
    timeline_from_json,
    timeline_to_json,
    validate,
)


def _interval_from(obj, label: str) -> Interval:
    try:
        return Interval(float(obj["start"]), float(obj["end"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolationError(f"bad interval for {label!r}: {exc}") from exc


def _policy_from(payload: dict) -> ValidationPolicy:
    eps = payload.get("eps_cov")
    return ValidationPolicy(eps_cov=float(eps)) if eps is not None else ValidationPolicy()


def _op_iou(payload: dict) -> dict:
    return {"iou": iou(_interval_from(payload.get("a"), "a"), _interval_from(payload.get("b"), "b"))}


def _op_grounding_eval(payload: dict) -> dict:
    rows = payload.get("samples")
    if not isinstance(rows, list):
        raise SchemaViolationError("'samples' must be a list")
    samples = [
        GroundingSample(
            query_id=str(row.get("query_id", i)),
            prediction=_interval_from(row.get("prediction"), "prediction"),
            ground_truth=_interval_from(row.get("ground_truth"), "ground_truth"),
        )
        for i, row in enumerate(rows)
    ]
    thresholds = tuple(payload.get("thresholds", DEFAULT_RECALL_THRESHOLDS))
    return grounding_eval(samples, thresholds).to_json()


def _op_highlight_eval(payload: dict) -> dict:
    rows = payload.get("samples")
    if not isinstance(rows, list):
        raise SchemaViolationError("'samples' must be a list")
    samples = []
    for i, row in enumerate(rows):
        try:
            predictions = tuple(
                ScoredWindow(_interval_from(w, "prediction"), float(w["score"]))
                for w in row.get("predictions", [])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolationError(f"bad prediction window: {exc}") from exc
        ground_truth = tuple(_interval_from(w, "ground_truth") for w in row.get("ground_truth", []))
        samples.append(
            HighlightSample(
                query_id=str(row.get("query_id", i)),
                predictions=predictions,
                ground_truth=ground_truth,
            )
        )
    hit_iou = float(payload.get("hit_iou", DEFAULT_HIT_IOU))
    return highlight_eval(samples, hit_iou=hit_iou).to_json()


def _op_parse_events(payload: dict) -> dict:
    text = payload.get("text")
    if not isinstance(text, str):
        raise SchemaViolationError("'text' must be a string")
    events, diagnostics = parse_events(text)
    return {"events": [e.to_json() for e in events], "diagnostics": diagnostics.to_json()}


def _op_parse_single_window(payload: dict) -> dict:
    text = payload.get("text")
    if not isinstance(text, str):
        raise SchemaViolationError("'text' must be a string")
    window = parse_single_window(text)
    return {"start": window.start, "end": window.end}


def _op_validate(payload: dict) -> dict:
    timeline = timeline_from_json(payload.get("timeline"))
    return validate(timeline, _policy_from(payload)).to_json()


def _op_normalize(payload: dict) -> dict:
    timeline = timeline_from_json(payload.get("timeline"))
    repaired = normalize(
        list(timeline.events),
        timeline.duration,
        _policy_from(payload),
        video_id=timeline.video_id,
    )
    return timeline_to_json(repaired)


OPS = {
    "iou": _op_iou,
    "grounding_eval": _op_grounding_eval,
    "highlight_eval": _op_highlight_eval,
    "parse_events": _op_parse_events,
    "parse_single_window": _op_parse_single_window,
    "validate": _op_validate,
    "normalize": _op_normalize,
}


def bind(op_name: str, payload: dict) -> dict:
    """Dispatch one operation; library errors keep their kind strings."""
    op = OPS.get(op_name)
    if op is None:
        raise UnknownOperationError(f"unknown operation {op_name!r}; expected one of {sorted(OPS)}")
    if not isinstance(payload, dict):
        raise SchemaViolationError("payload must be a JSON object")
    return op(payload)


def error_object(exc: Exception) -> dict:
    kind = exc.kind if isinstance(exc, EventlineError) else "Error"
    return {"error": {"kind": kind, "message": str(exc)}}
