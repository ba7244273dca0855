import { readFileSync } from "fs";

import { FORMAT_VERSION, SchemaVersionError } from "./types.js";

export interface DiagnosticsFile {
  header: Record<string, unknown>;
  /** tag -> sorted [time, value] pairs */
  series: Map<string, Array<[number, number]>>;
}

function checkVersion(found: unknown, path: string): void {
  if (found !== FORMAT_VERSION) {
    throw new SchemaVersionError(
      `${path}: format_version ${String(found)} does not match toolkit version ${FORMAT_VERSION}`,
    );
  }
}

export function readDiagnosticsJsonl(path: string): DiagnosticsFile {
  const lines = readFileSync(path, "utf8").trim().split("\n");
  if (lines.length === 0 || lines[0].length === 0) {
    throw new Error(`${path}: empty JSONL file`);
  }
  const header = JSON.parse(lines[0]) as Record<string, unknown>;
  checkVersion(header["format_version"], path);
  const series = new Map<string, Array<[number, number]>>();
  for (const line of lines.slice(1)) {
    const rec = JSON.parse(line) as {
      time: number;
      norm_tag: string;
      value: number;
    };
    const bucket = series.get(rec.norm_tag) ?? [];
    bucket.push([rec.time, rec.value]);
    series.set(rec.norm_tag, bucket);
  }
  for (const bucket of series.values()) {
    bucket.sort((a, b) => a[0] - b[0]);
  }
  return { header, series };
}

export interface GronwallData {
  t: number[];
  a: number[];
  boundLog: number;
  converged: boolean;
}

/** Solution CSV is `t,A` rows; the verification JSON carries the log bound. */
export function readGronwall(csvPath: string, reportPath: string): GronwallData {
  const rows = readFileSync(csvPath, "utf8").trim().split("\n");
  if (rows[0] !== "t,A") {
    throw new Error(`${csvPath}: expected a 't,A' header, found '${rows[0]}'`);
  }
  const t: number[] = [];
  const a: number[] = [];
  for (const row of rows.slice(1)) {
    const [ts, as] = row.split(",");
    t.push(Number(ts));
    a.push(Number(as));
  }
  const report = JSON.parse(readFileSync(reportPath, "utf8")) as {
    format_version?: number;
    problems: Array<{ bound_log: number; converged: boolean }>;
  };
  checkVersion(report.format_version, reportPath);
  const first = report.problems[0];
  return { t, a, boundLog: first.bound_log, converged: first.converged };
}

export interface SweepRow {
  member: number;
  axisValue: number;
  besov: number;
  lhsTotal: number;
  passes: boolean;
}

export function readSweepCsv(path: string): SweepRow[] {
  const lines = readFileSync(path, "utf8").trim().split("\n");
  const meta = lines[0];
  const match = /format_version=(\d+)/.exec(meta);
  checkVersion(match ? Number(match[1]) : undefined, path);
  const header = lines[1].split(",");
  const col = (name: string): number => {
    const idx = header.indexOf(name);
    if (idx < 0) throw new Error(`${path}: missing column '${name}'`);
    return idx;
  };
  const out: SweepRow[] = [];
  for (const line of lines.slice(2)) {
    const cells = line.split(",");
    out.push({
      member: Number(cells[col("member")]),
      axisValue: Number(cells[col("axis_value")]),
      besov: Number(cells[col("besov_m1_inf_inf")]),
      lhsTotal: Number(cells[col("lhs_total")]),
      passes: cells[col("passes_practical")] === "True",
    });
  }
  return out;
}
