/** Minimal deterministic SVG renderer: fixed canvas, fixed fonts, numbers
 *  serialized with a fixed precision so a given input always yields the
 *  same bytes. No DOM, no canvas, no randomness. */

import { AxisScale, Series } from "./types.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 };

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
];

function fmt(v: number): string {
  return Number.isFinite(v) ? v.toPrecision(8) : "0";
}

interface ScaleFn {
  (v: number): number;
  domain: [number, number];
  kind: AxisScale;
}

function makeScale(values: number[], range: [number, number],
                   kind: AxisScale): ScaleFn {
  let vals = values.filter((v) => Number.isFinite(v));
  if (kind === "log") {
    vals = vals.filter((v) => v > 0);
  }
  let lo = vals.length ? Math.min(...vals) : 0;
  let hi = vals.length ? Math.max(...vals) : 1;
  if (kind === "log") {
    if (!vals.length) { lo = 1e-3; hi = 1; }
    if (lo === hi) { lo /= 10; hi *= 10; }
    const la = Math.log10(lo);
    const lb = Math.log10(hi);
    const f = ((v: number) =>
      range[0] + ((Math.log10(Math.max(v, Number.MIN_VALUE)) - la) / (lb - la))
        * (range[1] - range[0])) as ScaleFn;
    f.domain = [lo, hi];
    f.kind = kind;
    return f;
  }
  if (lo === hi) { lo -= 1; hi += 1; }
  const f = ((v: number) =>
    range[0] + ((v - lo) / (hi - lo)) * (range[1] - range[0])) as ScaleFn;
  f.domain = [lo, hi];
  f.kind = kind;
  return f;
}

function axisTicks(scale: ScaleFn, count = 5): number[] {
  const [lo, hi] = scale.domain;
  if (scale.kind === "log") {
    const ticks: number[] = [];
    const from = Math.ceil(Math.log10(lo));
    const to = Math.floor(Math.log10(hi));
    for (let e = from; e <= to; e++) ticks.push(10 ** e);
    return ticks.length ? ticks : [lo, hi];
  }
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

export interface RenderOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: AxisScale;
  yScale: AxisScale;
  scatter?: boolean;
}

export function renderFigure(series: Series[], opts: RenderOptions): string {
  const body: string[] = [];
  const plotW: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
  const plotH: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];
  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  const sx = makeScale(xs, plotW, opts.xScale);
  const sy = makeScale(ys, plotH, opts.yScale);

  for (const tick of axisTicks(sx)) {
    const px = fmt(sx(tick));
    body.push(`<line x1="${px}" y1="${fmt(plotH[0])}" x2="${px}" y2="${fmt(plotH[1])}" stroke="#dddddd"/>`);
    body.push(`<text x="${px}" y="${fmt(plotH[0] + 18)}" font-size="11" text-anchor="middle">${tick.toExponential(1)}</text>`);
  }
  for (const tick of axisTicks(sy)) {
    const py = fmt(sy(tick));
    body.push(`<line x1="${fmt(plotW[0])}" y1="${py}" x2="${fmt(plotW[1])}" y2="${py}" stroke="#dddddd"/>`);
    body.push(`<text x="${fmt(plotW[0] - 6)}" y="${py}" font-size="11" text-anchor="end">${tick.toExponential(1)}</text>`);
  }

  series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const yv = s.y[i];
      if (opts.yScale === "log" && !(yv > 0)) continue;
      pts.push(`${fmt(sx(s.x[i]))},${fmt(sy(yv))}`);
    }
    if (opts.scatter) {
      for (const p of pts) {
        const [cx, cy] = p.split(",");
        body.push(`<circle cx="${cx}" cy="${cy}" r="4" fill="${color}"/>`);
      }
    } else if (pts.length > 0) {
      body.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    }
    body.push(`<text x="${fmt(plotW[1] - 8)}" y="${fmt(MARGIN.top + 14 * (idx + 1))}" font-size="11" text-anchor="end" fill="${color}">${escapeXml(s.label)}</text>`);
  });

  if (series.every((s) => s.x.length === 0)) {
    body.push(`<text x="${WIDTH / 2}" y="${HEIGHT / 2}" font-size="18" text-anchor="middle" fill="#888888">no data</text>`);
  }

  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" font-family="monospace">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<text x="${WIDTH / 2}" y="22" font-size="14" text-anchor="middle">${escapeXml(opts.title)}</text>`,
    `<text x="${WIDTH / 2}" y="${HEIGHT - 12}" font-size="12" text-anchor="middle">${escapeXml(opts.xLabel)}</text>`,
    `<text x="16" y="${HEIGHT / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 ${HEIGHT / 2})">${escapeXml(opts.yLabel)}</text>`,
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${WIDTH - MARGIN.left - MARGIN.right}" height="${HEIGHT - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#333333"/>`,
    ...body,
    `</svg>`,
  ].join("\n");
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
