#!/usr/bin/env node
/** Figure generation from critns output files.
 *
 *  Usage: critns-plot --spec plotspec.json
 *
 *  Writes the SVG named by the spec, a sibling `<output>.arrays.json` with
 *  the plotted arrays, and prints their sha256 regression hash. Inputs are
 *  never modified.
 */

import { readFileSync, writeFileSync } from "fs";
import { pathToFileURL } from "url";

import { canonicalJson, plottedArraysHash } from "./hash.js";
import { runPlot } from "./plots.js";
import { PlotSpecSchema, SchemaVersionError } from "./types.js";

export function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx < 0 || idx + 1 >= argv.length) {
    console.error("usage: critns-plot --spec PATH");
    return 1;
  }
  let spec;
  try {
    spec = PlotSpecSchema.parse(JSON.parse(readFileSync(argv[idx + 1], "utf8")));
  } catch (err) {
    console.error(`error: invalid plot spec: ${(err as Error).message}`);
    return 1;
  }
  try {
    const result = runPlot(spec);
    for (const warning of result.warnings) {
      console.warn(`warning: ${warning}`);
    }
    writeFileSync(spec.output, result.svg);
    const arrays = result.series.map((s) => ({ label: s.label, x: s.x, y: s.y }));
    writeFileSync(`${spec.output}.arrays.json`, canonicalJson(arrays));
    console.log(`${plottedArraysHash(result.series)}  ${spec.output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaVersionError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
