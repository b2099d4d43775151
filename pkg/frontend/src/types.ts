/**
 * JSON shapes shared with the core toolkit. These mirror the canonical
 * schemas bit-for-bit; conversion is always lossless JSON.
 */

export interface IntervalJson {
  start: number;
  end: number;
}

export interface EventJson extends IntervalJson {
  id: number;
  caption: string;
}

export interface TimelineJson {
  video_id: string;
  duration: number;
  events: EventJson[];
}

export interface ViolationJson {
  kind:
    | "Overlap"
    | "Gap"
    | "OutOfBounds"
    | "Unsorted"
    | "EmptyCaption"
    | "ZeroLength";
  indices: number[];
  magnitude: number;
  message: string;
}

export interface ValidationReportJson {
  violations: ViolationJson[];
}

export interface GroundingSampleJson {
  query_id?: string;
  prediction: IntervalJson;
  ground_truth: IntervalJson;
}

export interface ScoredWindowJson extends IntervalJson {
  score: number;
}

export interface HighlightSampleJson {
  query_id?: string;
  predictions: ScoredWindowJson[];
  ground_truth: IntervalJson[];
}

export interface GroundingSummaryJson {
  n_samples: number;
  protocol: string;
  miou: number;
  recall_at: Record<string, number>;
}

export interface HighlightSummaryJson {
  n_samples: number;
  protocol: string;
  map: number;
  hit_at_1: number;
}

export interface ParsedEventJson extends IntervalJson {
  caption: string;
  span: [number, number];
}

export interface ParseDiagnosticJson {
  line: number;
  kind: "NoTimestamp" | "InvertedInterval" | "BadNumber" | "DuplicateLine";
  message: string;
}

export interface ParseEventsResultJson {
  events: ParsedEventJson[];
  diagnostics: ParseDiagnosticJson[];
}

export interface ErrorJson {
  error: {
    kind: string;
    message: string;
  };
}

export type OpName =
  | "iou"
  | "grounding_eval"
  | "highlight_eval"
  | "parse_events"
  | "parse_single_window"
  | "validate"
  | "normalize";
