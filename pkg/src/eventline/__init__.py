"""Tools for dense video event timelines.

Validation and repair of event timelines, masked-event training records,
caption-coherence filtering, tolerant parsing of timestamped model output,
temporal grounding / highlight detection metrics, streaming corpus
statistics, and frame-grid composition with burned-in timestamps.
"""

from .errors import EventlineError
from .masking import (
    DEFAULT_TEMPLATE,
    MaskedSample,
    PromptTemplate,
    mask_event,
    reconstruct,
    render,
    sample_mask,
)
from .metrics import (
    EvalSummary,
    GroundingSample,
    HighlightSample,
    ScoredWindow,
    average_precision,
    grounding_eval,
    highlight_eval,
    iou,
)
from .parsing import parse_events, parse_single_window
from .timeline import (
    Event,
    Interval,
    Timeline,
    ValidationPolicy,
    ValidationReport,
    coverage_ratio,
    event_density,
    normalize,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "EventlineError",
    "Event",
    "Interval",
    "Timeline",
    "ValidationPolicy",
    "ValidationReport",
    "coverage_ratio",
    "event_density",
    "normalize",
    "validate",
    "EvalSummary",
    "GroundingSample",
    "HighlightSample",
    "ScoredWindow",
    "average_precision",
    "grounding_eval",
    "highlight_eval",
    "iou",
    "parse_events",
    "parse_single_window",
    "DEFAULT_TEMPLATE",
    "MaskedSample",
    "PromptTemplate",
    "mask_event",
    "reconstruct",
    "render",
    "sample_mask",
    "__version__",
]
