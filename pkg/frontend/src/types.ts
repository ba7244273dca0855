import { z } from "zod";

/** Serialized-format version this toolchain understands. Input headers must
 *  match exactly; a mismatch is a hard error, not a warning. */
export const FORMAT_VERSION = 1;

export const PlotKind = z.enum(["timeseries", "gronwall", "sweep_scatter"]);
export type PlotKind = z.infer<typeof PlotKind>;

export const AxisScale = z.enum(["linear", "log"]);
export type AxisScale = z.infer<typeof AxisScale>;

export const PlotSpecSchema = z.object({
  kind: PlotKind,
  inputs: z.array(z.string()).min(1),
  output: z.string(),
  x_scale: AxisScale.optional(),
  y_scale: AxisScale.optional(),
  /** timeseries only: restrict to these norm tags (default: all present) */
  tags: z.array(z.string()).optional(),
  title: z.string().optional(),
});
export type PlotSpec = z.infer<typeof PlotSpecSchema>;

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

/** What a plot actually drew: the regression-hashable payload. */
export interface PlotResult {
  svg: string;
  series: Series[];
  warnings: string[];
}

export class SchemaVersionError extends Error {}
