/**
 * Typed wrappers over the bind surface. Every function defers the actual
 * computation to the core toolkit, so numbers here are identical to what
 * the CLI and the Python library produce on the same input.
 */

import { bind } from "./runner.js";
import type {
  GroundingSampleJson,
  GroundingSummaryJson,
  HighlightSampleJson,
  HighlightSummaryJson,
  IntervalJson,
  ParseEventsResultJson,
  TimelineJson,
  ValidationReportJson,
} from "./types.js";

/** Intersection over union of two time windows, in [0, 1]. */
export function iou(a: IntervalJson, b: IntervalJson): number {
  return bind<{ iou: number }>("iou", { a, b }).iou;
}

/** mIoU and Recall@1 at each IoU threshold over a query set. */
export function evalGrounding(
  samples: GroundingSampleJson[],
  thresholds?: number[],
): GroundingSummaryJson {
  const payload: Record<string, unknown> = { samples };
  if (thresholds) {
    payload["thresholds"] = thresholds;
  }
  return bind<GroundingSummaryJson>("grounding_eval", payload);
}

/** mAP (greedy matching, IoU 0.50:0.05:0.95) and HIT@1 over ranked windows. */
export function evalHighlight(
  samples: HighlightSampleJson[],
  hitIou?: number,
): HighlightSummaryJson {
  const payload: Record<string, unknown> = { samples };
  if (hitIou !== undefined) {
    payload["hit_iou"] = hitIou;
  }
  return bind<HighlightSummaryJson>("highlight_eval", payload);
}

/** Tolerant extraction of timestamped events from free-form text. */
export function parseEvents(text: string): ParseEventsResultJson {
  return bind<ParseEventsResultJson>("parse_events", { text });
}

/** First increasing (start, end) window found anywhere in the text. */
export function parseSingleWindow(text: string): IntervalJson {
  return bind<IntervalJson>("parse_single_window", { text });
}

/** Every constraint violation in a candidate timeline. */
export function validateTimeline(
  timeline: TimelineJson,
  epsCov?: number,
): ValidationReportJson {
  const payload: Record<string, unknown> = { timeline };
  if (epsCov !== undefined) {
    payload["eps_cov"] = epsCov;
  }
  return bind<ValidationReportJson>("validate", payload);
}

/** Repair a candidate timeline into a validate-clean one. */
export function normalizeTimeline(
  timeline: TimelineJson,
  epsCov?: number,
): TimelineJson {
  const payload: Record<string, unknown> = { timeline };
  if (epsCov !== undefined) {
    payload["eps_cov"] = epsCov;
  }
  return bind<TimelineJson>("normalize", payload);
}
