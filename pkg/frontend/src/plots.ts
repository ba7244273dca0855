import { readDiagnosticsJsonl, readGronwall, readSweepCsv } from "./readers.js";
import { renderFigure } from "./svg.js";
import { PlotResult, PlotSpec, Series } from "./types.js";

/** Tags this toolchain knows how to label; anything else in the input is
 *  skipped with a warning rather than failing the figure. */
const KNOWN_TAGS = new Set([
  "l2_sq", "h1_sq", "nu_h_m1", "u0_source_h_m1", "u0_source_l2",
  "heat_flow_linf", "v_h1_sq", "v_h2_sq", "v_h_m1", "v_l2_sq",
  "grad_v_l3", "grad_ul_l3", "f_source", "solenoidal_defect",
  "energy_defect", "prop31_ratio", "h1_energy_ratio",
]);

export function plotTimeseries(spec: PlotSpec): PlotResult {
  const { series: byTag } = readDiagnosticsJsonl(spec.inputs[0]);
  const warnings: string[] = [];
  const wanted = spec.tags ?? [...byTag.keys()].sort();
  const series: Series[] = [];
  for (const tag of wanted) {
    if (!KNOWN_TAGS.has(tag)) {
      warnings.push(`unknown norm_tag '${tag}' skipped`);
      continue;
    }
    const rows = byTag.get(tag);
    if (!rows) {
      warnings.push(`norm_tag '${tag}' not present in input`);
      continue;
    }
    series.push({ label: tag, x: rows.map((r) => r[0]), y: rows.map((r) => r[1]) });
  }
  const svg = renderFigure(series, {
    title: spec.title ?? "diagnostic time series",
    xLabel: "t",
    yLabel: "norm value",
    xScale: spec.x_scale ?? "linear",
    yScale: spec.y_scale ?? "log",
  });
  return { svg, series, warnings };
}

export function plotGronwall(spec: PlotSpec): PlotResult {
  if (spec.inputs.length < 2) {
    throw new Error("gronwall plots need [solution CSV, verification JSON]");
  }
  const data = readGronwall(spec.inputs[0], spec.inputs[1]);
  const series: Series[] = [
    { label: "A(t)", x: data.t, y: data.a },
    // the exponential bound is astronomically large; plot its log instead
    {
      label: "log bound (constant in t)",
      x: [data.t[0], data.t[data.t.length - 1]],
      y: [data.boundLog, data.boundLog],
    },
  ];
  const warnings = data.converged ? [] : ["solution did not converge; plotting last iterate"];
  const svg = renderFigure(series, {
    title: spec.title ?? "extremal solution vs exponential budget (log scale)",
    xLabel: "t",
    yLabel: "A(t), log-budget",
    xScale: spec.x_scale ?? "linear",
    yScale: spec.y_scale ?? "log",
  });
  return { svg, series, warnings };
}

export function plotSweep(spec: PlotSpec): PlotResult {
  const rows = readSweepCsv(spec.inputs[0]);
  const series: Series[] = [
    {
      label: "critical norm vs condition LHS",
      x: rows.map((r) => r.besov),
      y: rows.map((r) => r.lhsTotal),
    },
  ];
  const svg = renderFigure(series, {
    title: spec.title ?? "largeness vs smallness across the family",
    xLabel: "B^-1_inf,inf norm",
    yLabel: "condition LHS",
    xScale: spec.x_scale ?? "log",
    yScale: spec.y_scale ?? "log",
    scatter: true,
  });
  return { svg, series, warnings: [] };
}

export function runPlot(spec: PlotSpec): PlotResult {
  switch (spec.kind) {
    case "timeseries":
      return plotTimeseries(spec);
    case "gronwall":
      return plotGronwall(spec);
    case "sweep_scatter":
      return plotSweep(spec);
  }
}
