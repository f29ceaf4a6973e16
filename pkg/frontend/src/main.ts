#!/usr/bin/env node
// report-plots: convergence and energy figures from harness CSVs.
//
// Usage:
//   report-plots convergence <summary.csv> <out.svg>
//   report-plots energy <timeseries.csv> <out.svg>
//
// Each figure also writes a machine-readable sidecar at <out.svg>.data.csv
// holding exactly the arrays plotted.  Inputs are never modified.

import { readFileSync, writeFileSync } from "fs";
import { resolve } from "path";
import { fileURLToPath } from "url";

import { buildConvergence } from "./convergence.js";
import { buildEnergy } from "./energy.js";

export function run(argv: string[]): number {
  if (argv.length !== 3 || !["convergence", "energy"].includes(argv[0])) {
    console.error(
      "usage: report-plots <convergence|energy> <input.csv> <output.svg>",
    );
    return 2;
  }
  const [command, csvPath, outPath] = argv;
  let csvText: string;
  try {
    csvText = readFileSync(csvPath, "utf-8");
  } catch (err) {
    console.error(`cannot read ${csvPath}: ${(err as Error).message}`);
    return 1;
  }
  try {
    const result =
      command === "convergence" ? buildConvergence(csvText) : buildEnergy(csvText);
    writeFileSync(outPath, result.svg, "utf-8");
    writeFileSync(outPath + ".data.csv", result.sidecar, "utf-8");
  } catch (err) {
    console.error(`${command} failed: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  fileURLToPath(import.meta.url) === resolve(process.argv[1]);
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
