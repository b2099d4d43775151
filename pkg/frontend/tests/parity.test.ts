/**
 * Binding parity: random fixtures pushed through the bindings must match a
 * direct CLI invocation byte-for-byte (outputs are canonical JSON lines).
 */

import { spawnSync } from "node:child_process";
import { describe, expect, it } from "vitest";

import { bindMany, resolveCommand, runBindRaw } from "../src/runner.js";
import { EventlineError } from "../src/errors.js";

/** Deterministic PRNG so fixture generation is reproducible. */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function centi(rng: () => number, lo: number, hi: number): number {
  return Math.round((lo + (hi - lo) * rng()) * 100) / 100;
}

function interval(rng: () => number): { start: number; end: number } {
  const start = centi(rng, 0, 100);
  return { start, end: start + centi(rng, 0.01, 60) };
}

function timelinePayload(rng: () => number, broken: boolean) {
  const n = 2 + Math.floor(rng() * 5);
  const duration = 30 + Math.floor(rng() * 200);
  const cuts = new Set<number>();
  while (cuts.size < n - 1) {
    cuts.add(1 + Math.floor(rng() * (duration - 1)));
  }
  const edges = [0, ...[...cuts].sort((a, b) => a - b), duration];
  const events = [];
  for (let k = 0; k < n; k++) {
    let start = edges[k]!;
    let end = edges[k + 1]!;
    if (broken && k === 0) {
      start -= 2.5; // out of bounds
    }
    if (broken && k === 1) {
      start -= Math.min(1.5, edges[1]! / 2); // overlap with predecessor
    }
    events.push({ id: k, start, end, caption: `segment ${k} of clip` });
  }
  return { timeline: { video_id: `tl${Math.floor(rng() * 1e6)}`, duration, events } };
}

function groundingPayload(rng: () => number) {
  const n = 1 + Math.floor(rng() * 4);
  const samples = [];
  for (let i = 0; i < n; i++) {
    samples.push({
      query_id: `q${i}`,
      prediction: interval(rng),
      ground_truth: interval(rng),
    });
  }
  return { samples };
}

function highlightPayload(rng: () => number) {
  const n = 1 + Math.floor(rng() * 3);
  const samples = [];
  for (let i = 0; i < n; i++) {
    const preds = [];
    for (let k = 0, m = Math.floor(rng() * 5); k < m; k++) {
      preds.push({ ...interval(rng), score: Math.round(rng() * 1000) / 1000 });
    }
    const gts = [];
    for (let k = 0, m = 1 + Math.floor(rng() * 3); k < m; k++) {
      gts.push(interval(rng));
    }
    samples.push({ query_id: `q${i}`, predictions: preds, ground_truth: gts });
  }
  return { samples };
}

const TEXT_SNIPPETS = [
  "161.00 - 183.00: filling and wrapping spring rolls",
  "From 10.5 to 20.25, first step\n01:30 - 02:00: second step",
  "no events in this prose at all",
  "from 9 to 3, rewound window",
  "- 5.00 - 9.00: bullet item\nsome prose\n- 9.00 - 12.00: next item",
  "The answer is from 185.00 to 205.00 overall.",
];

function textPayload(rng: () => number) {
  const base = TEXT_SNIPPETS[Math.floor(rng() * TEXT_SNIPPETS.length)]!;
  return { text: rng() < 0.5 ? base : `${base}\nextra tail ${Math.floor(rng() * 100)}` };
}

function directCliRaw(op: string, input: string): string {
  const [command, ...prefix] = resolveCommand();
  // exit code 1 just flags error lines in the stream; stdout is the result
  const result = spawnSync(command!, [...prefix, "bind", op], {
    input,
    encoding: "utf-8",
    maxBuffer: 512 * 1024 * 1024,
  });
  if (result.error) {
    throw result.error;
  }
  return result.stdout;
}

/** Stable canonical re-serialization: sorted keys, no whitespace. */
function canonical(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(canonical).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${canonical(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

/** Object keys must arrive sorted at every depth (JSON.parse keeps order). */
function assertSortedKeys(value: unknown): void {
  if (Array.isArray(value)) {
    value.forEach(assertSortedKeys);
    return;
  }
  if (value !== null && typeof value === "object") {
    const keys = Object.keys(value);
    expect(keys).toEqual([...keys].sort());
    Object.values(value).forEach(assertSortedKeys);
  }
}

describe("binding parity with the CLI", () => {
  const rng = mulberry32(0xe7e7e7);
  const plans: Array<{ op: string; payloads: unknown[] }> = [
    { op: "iou", payloads: Array.from({ length: 400 }, () => ({ a: interval(rng), b: interval(rng) })) },
    { op: "validate", payloads: Array.from({ length: 150 }, () => timelinePayload(rng, rng() < 0.5)) },
    { op: "normalize", payloads: Array.from({ length: 100 }, () => timelinePayload(rng, rng() < 0.5)) },
    { op: "parse_events", payloads: Array.from({ length: 125 }, () => textPayload(rng)) },
    { op: "parse_single_window", payloads: Array.from({ length: 125 }, () => textPayload(rng)) },
    { op: "grounding_eval", payloads: Array.from({ length: 50 }, () => groundingPayload(rng)) },
    { op: "highlight_eval", payloads: Array.from({ length: 50 }, () => highlightPayload(rng)) },
  ];

  it("covers 1,000 random fixtures", () => {
    const total = plans.reduce((n, plan) => n + plan.payloads.length, 0);
    expect(total).toBe(1000);
  });

  for (const plan of plans) {
    it(`${plan.op}: binding output equals direct CLI output byte-for-byte`, () => {
      const input = plan.payloads.map((p) => JSON.stringify(p)).join("\n") + "\n";
      const viaBinding = runBindRaw(plan.op, input);
      const viaCli = directCliRaw(plan.op, input);
      expect(viaBinding).toBe(viaCli);

      // and the lines already are canonical: sorted keys, no padding
      // (numeric literals keep the producer's shortest-round-trip form)
      for (const line of viaBinding.split("\n").filter((l) => l.trim())) {
        expect(line).not.toMatch(/": /);
        assertSortedKeys(JSON.parse(line));
      }

      // bindMany parses every line, in order, errors in place
      const results = bindMany(plan.op, plan.payloads);
      expect(results).toHaveLength(plan.payloads.length);
      const rawLines = viaCli.split("\n").filter((l) => l.trim());
      results.forEach((result, i) => {
        const parsed = JSON.parse(rawLines[i]!);
        if (result instanceof EventlineError) {
          expect(parsed.error.kind).toBe(result.kind);
        } else {
          expect(canonical(result)).toBe(canonical(parsed));
        }
      });
    });
  }
});
