import { createHash } from "crypto";

import { Series } from "./types.js";

/** Canonical JSON: sorted keys, exact float serialization via JS number
 *  stringification (round-trip stable for doubles). */
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`);
  return `{${entries.join(",")}}`;
}

/** Regression hash of what a figure plots: the arrays, not the pixels. */
export function plottedArraysHash(series: Series[]): string {
  const payload = series.map((s) => ({ label: s.label, x: s.x, y: s.y }));
  return createHash("sha256").update(canonicalJson(payload)).digest("hex");
}
