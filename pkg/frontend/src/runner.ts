/**
 * Low-level bridge to the core toolkit's `bind` surface.
 *
 * One operation call spawns `eventline bind <op>`, writes JSON payloads
 * (one per line) to stdin, and reads canonical JSON lines back. Batch as
 * many payloads as possible per call: the process spawn dominates latency.
 *
 * The interpreter is resolved from EVENTLINE_CMD (a full command string,
 * e.g. "python3 -m eventline" or "/usr/local/bin/eventline"), defaulting
 * to `python3 -m eventline`.
 */

import { spawnSync } from "node:child_process";

import { EventlineError } from "./errors.js";
import type { ErrorJson, OpName } from "./types.js";

const MAX_OUTPUT_BYTES = 512 * 1024 * 1024;

export function resolveCommand(): string[] {
  const override = process.env["EVENTLINE_CMD"];
  if (override && override.trim()) {
    return override.trim().split(/\s+/);
  }
  return ["python3", "-m", "eventline"];
}

/** Run one bind op over raw payload lines; returns raw stdout. */
export function runBindRaw(op: string, inputLines: string): string {
  const [command, ...prefix] = resolveCommand();
  const result = spawnSync(command, [...prefix, "bind", op], {
    input: inputLines,
    encoding: "utf-8",
    maxBuffer: MAX_OUTPUT_BYTES,
  });
  if (result.error) {
    throw new EventlineError(
      "Error",
      `failed to launch ${command}: ${result.error.message}`,
    );
  }
  // Exit code 1 marks per-line error objects and code 2 a bad op name;
  // both arrive as {"error": ...} lines on stdout and are handled there.
  if (result.status !== 0 && !result.stdout) {
    throw new EventlineError(
      "Error",
      `bind ${op} exited with ${result.status}: ${result.stderr}`,
    );
  }
  return result.stdout;
}

function isErrorObject(value: unknown): value is ErrorJson {
  return (
    typeof value === "object" &&
    value !== null &&
    "error" in value &&
    typeof (value as ErrorJson).error?.kind === "string"
  );
}

/**
 * Run one operation over a batch of payloads. Results come back in input
 * order; a payload that failed yields an EventlineError in its slot
 * instead of throwing, so one bad fixture cannot sink a batch.
 */
export function bindMany<T>(
  op: OpName | string,
  payloads: unknown[],
): (T | EventlineError)[] {
  if (payloads.length === 0) {
    return [];
  }
  const input = payloads.map((p) => JSON.stringify(p)).join("\n") + "\n";
  const stdout = runBindRaw(op, input);
  const lines = stdout.split("\n").filter((line) => line.trim());
  if (lines.length === 1 && payloads.length > 1) {
    // A single error line for a multi-payload batch means the op itself
    // was rejected (e.g. unknown op) before any payload was read.
    const only = JSON.parse(lines[0]!);
    if (isErrorObject(only)) {
      throw new EventlineError(only.error.kind, only.error.message);
    }
  }
  if (lines.length !== payloads.length) {
    throw new EventlineError(
      "Error",
      `expected ${payloads.length} result lines, got ${lines.length}`,
    );
  }
  return lines.map((line) => {
    const parsed = JSON.parse(line);
    if (isErrorObject(parsed)) {
      return new EventlineError(parsed.error.kind, parsed.error.message);
    }
    return parsed as T;
  });
}

/** Run one operation on one payload; failures throw EventlineError. */
export function bind<T>(op: OpName | string, payload: unknown): T {
  const [result] = bindMany<T>(op, [payload]);
  if (result instanceof EventlineError) {
    throw result;
  }
  return result as T;
}
