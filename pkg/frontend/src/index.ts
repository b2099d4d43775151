/**
 * eventline-bindings: the eventline toolkit for Node workflows.
 *
 * ```ts
 * import { iou, evalGrounding, parseEvents, validateTimeline } from "eventline-bindings";
 *
 * iou({ start: 0, end: 10 }, { start: 5, end: 15 }); // 0.3333...
 * ```
 *
 * Requires the Python package to be installed; the command is resolved from
 * EVENTLINE_CMD (default `python3 -m eventline`).
 */

export { EventlineError } from "./errors.js";
export {
  evalGrounding,
  evalHighlight,
  iou,
  normalizeTimeline,
  parseEvents,
  parseSingleWindow,
  validateTimeline,
} from "./ops.js";
export { bind, bindMany, resolveCommand, runBindRaw } from "./runner.js";
export type * from "./types.js";
