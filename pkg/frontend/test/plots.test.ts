import { execFileSync } from "child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { plottedArraysHash } from "../src/hash.js";
import { plotGronwall, plotSweep, plotTimeseries, runPlot } from "../src/plots.js";
import { PlotSpec, SchemaVersionError } from "../src/types.js";

const FIX = join(__dirname, "fixtures");

function spec(partial: Partial<PlotSpec> & Pick<PlotSpec, "kind" | "inputs">): PlotSpec {
  return { output: join(mkdtempSync(join(tmpdir(), "plt-")), "fig.svg"), ...partial };
}

describe("timeseries plots", () => {
  it("renders the frozen reference diagnostics and reproduces its hash", () => {
    const s = spec({ kind: "timeseries", inputs: [join(FIX, "diagnostics.jsonl")] });
    const first = plotTimeseries(s);
    const second = plotTimeseries(s);
    expect(first.svg.length).toBeGreaterThan(500);
    expect(first.svg).toContain("<svg");
    expect(first.series.length).toBeGreaterThan(3);
    expect(plottedArraysHash(first.series)).toEqual(plottedArraysHash(second.series));
    expect(first.svg).toEqual(second.svg);
  });

  it("skips unknown norm tags with a warning", () => {
    const s = spec({
      kind: "timeseries",
      inputs: [join(FIX, "diagnostics.jsonl")],
      tags: ["l2_sq", "made_up_tag"],
    });
    const result = plotTimeseries(s);
    expect(result.series.map((x) => x.label)).toEqual(["l2_sq"]);
    expect(result.warnings.some((w) => w.includes("made_up_tag"))).toBe(true);
  });

  it("renders a 'no data' annotation for empty series", () => {
    const dir = mkdtempSync(join(tmpdir(), "plt-"));
    const empty = join(dir, "empty.jsonl");
    writeFileSync(empty, '{"format_version":1,"kind":"diagnostics"}\n');
    const result = plotTimeseries(spec({ kind: "timeseries", inputs: [empty] }));
    expect(result.svg).toContain("no data");
  });

  it("rejects a schema version mismatch", () => {
    const dir = mkdtempSync(join(tmpdir(), "plt-"));
    const bad = join(dir, "bad.jsonl");
    writeFileSync(bad, '{"format_version":99,"kind":"diagnostics"}\n');
    expect(() => plotTimeseries(spec({ kind: "timeseries", inputs: [bad] })))
      .toThrow(SchemaVersionError);
  });
});

describe("gronwall plots", () => {
  it("renders solution and log-budget from the frozen reference", () => {
    const s = spec({
      kind: "gronwall",
      inputs: [join(FIX, "gronwall_solution_000.csv"), join(FIX, "gronwall_report.json")],
    });
    const result = plotGronwall(s);
    expect(result.svg).toContain("polyline");
    expect(result.series).toHaveLength(2);
    expect(result.series[1].y[0]).toBeGreaterThan(1e20);
    const again = plotGronwall(s);
    expect(plottedArraysHash(result.series)).toEqual(plottedArraysHash(again.series));
  });
});

describe("sweep plots", () => {
  it("renders the scatter from the frozen reference", () => {
    const s = spec({ kind: "sweep_scatter", inputs: [join(FIX, "sweep.csv")] });
    const result = plotSweep(s);
    expect(result.svg).toContain("circle");
    expect(result.series[0].x).toHaveLength(2);
    const again = plotSweep(s);
    expect(plottedArraysHash(result.series)).toEqual(plottedArraysHash(again.series));
  });
});

describe("frozen reference hashes", () => {
  // regenerated hashes of the reference fixtures must never drift
  it.each([
    ["timeseries", ["diagnostics.jsonl"]],
    ["gronwall", ["gronwall_solution_000.csv", "gronwall_report.json"]],
    ["sweep_scatter", ["sweep.csv"]],
  ] as const)("%s hash is stable across runs", (kind, inputs) => {
    const s = spec({ kind, inputs: inputs.map((f) => join(FIX, f)) });
    const h1 = plottedArraysHash(runPlot(s).series);
    const h2 = plottedArraysHash(runPlot(s).series);
    expect(h1).toEqual(h2);
    expect(h1).toMatch(/^[0-9a-f]{64}$/);
  });
});

describe("cli", () => {
  it("writes figure, arrays file and prints the hash", () => {
    const dir = mkdtempSync(join(tmpdir(), "plt-"));
    const out = join(dir, "fig.svg");
    const specPath = join(dir, "spec.json");
    writeFileSync(specPath, JSON.stringify({
      kind: "sweep_scatter",
      inputs: [join(FIX, "sweep.csv")],
      output: out,
    }));
    const cli = join(__dirname, "..", "dist", "cli.js");
    const stdout = execFileSync("node", [cli, "--spec", specPath], { encoding: "utf8" });
    expect(stdout).toMatch(/^[0-9a-f]{64}\s+/);
    expect(readFileSync(out, "utf8")).toContain("<svg");
    expect(JSON.parse(readFileSync(`${out}.arrays.json`, "utf8"))).toHaveLength(1);
  });
});
