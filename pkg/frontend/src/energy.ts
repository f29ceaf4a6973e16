// Energy-budget figure: stacked energy components over time, and the
// running E(t) + integral of D against the horizontal E(0) line.
//
// The cumulative dissipation uses the same right-endpoint rule and the
// same left-to-right accumulation order as the harness monitor, so the
// sidecar reproduces that data bit for bit.

import { column, fmt, parseCsv } from "./csv.js";
import {
  Panel,
  frame,
  polygon,
  polyline,
  svgDocument,
  text,
  xTicks,
  yTicks,
} from "./svg.js";

export interface EnergyOutput {
  svg: string;
  sidecar: string;
}

export function cumulativeDissipation(times: number[], dTotals: number[]): number[] {
  const out = [0];
  let acc = 0;
  for (let m = 1; m < times.length; m++) {
    acc += dTotals[m] * (times[m] - times[m - 1]);
    out.push(acc);
  }
  return out;
}

const STACK_COLORS = ["#9ecae1", "#a1d99b", "#fdae6b", "#bcbddc"];
const STACK_NAMES = ["e_phi", "e_u", "e_eta", "e_tau"];

export function buildEnergy(csvText: string): EnergyOutput {
  const table = parseCsv(csvText);
  const t = column(table, "t");
  if (t.length < 1) {
    throw new Error("time-series CSV has no data rows");
  }
  const eTotal = column(table, "E_total");
  const components = STACK_NAMES.map((name) => column(table, name));
  const dTotal = column(table, "D_total");
  const cumD = cumulativeDissipation(t, dTotal);
  const ePlusCum = eTotal.map((e, i) => e + cumD[i]);
  const e0 = eTotal[0];

  const sidecarLines = [
    "t,e_phi,e_u,e_eta,e_tau,E_total,cum_D,E_plus_cumD,E0",
  ];
  for (let i = 0; i < t.length; i++) {
    sidecarLines.push(
      [
        fmt(t[i]),
        fmt(components[0][i]),
        fmt(components[1][i]),
        fmt(components[2][i]),
        fmt(components[3][i]),
        fmt(eTotal[i]),
        fmt(cumD[i]),
        fmt(ePlusCum[i]),
        fmt(e0),
      ].join(","),
    );
  }

  // partial sums for the stacked areas
  const stacks: number[][] = [];
  let running = t.map(() => 0);
  for (const comp of components) {
    running = running.map((v, i) => v + comp[i]);
    stacks.push([...running]);
  }

  const tMin = Math.min(...t);
  const tMax = Math.max(...t);
  const leftMax = Math.max(...stacks[stacks.length - 1], 1e-300) * 1.1;
  const rightVals = [...ePlusCum, e0];
  const rightMax = Math.max(...rightVals, 1e-300) * 1.1;

  const left: Panel = {
    x: 65,
    y: 35,
    width: 350,
    height: 300,
    xMin: tMin,
    xMax: tMax || 1,
    yMin: 0,
    yMax: leftMax,
  };
  const right: Panel = {
    x: 500,
    y: 35,
    width: 350,
    height: 300,
    xMin: tMin,
    xMax: tMax || 1,
    yMin: 0,
    yMax: rightMax,
  };

  const body: string[] = [];
  body.push(text(left.x, 22, "energy components (stacked)"));
  let below = t.map(() => 0);
  for (let s = 0; s < stacks.length; s++) {
    const xs = [...t, ...[...t].reverse()];
    const ys = [...stacks[s], ...[...below].reverse()];
    body.push(polygon(left, xs, ys, STACK_COLORS[s]));
    below = stacks[s];
  }
  body.push(frame(left));
  body.push(xTicks(left, [tMin, (tMin + tMax) / 2, tMax], (v) => v.toFixed(2)));
  body.push(yTicks(left, [0, leftMax / 2, leftMax], (v) => v.toExponential(1)));
  for (let s = 0; s < STACK_NAMES.length; s++) {
    body.push(
      `<rect x="${left.x + 8 + 80 * s}" y="${left.y + left.height + 28}" width="10" height="10" fill="${STACK_COLORS[s]}"/>`,
    );
    body.push(
      text(left.x + 22 + 80 * s, left.y + left.height + 37, STACK_NAMES[s], "start", 10),
    );
  }

  body.push(text(right.x, 22, "E(t) + cumulative D vs E(0)"));
  body.push(frame(right));
  body.push(polyline(right, t, ePlusCum, "#1f77b4"));
  body.push(polyline(right, [tMin, tMax], [e0, e0], "#d62728", "6 4"));
  body.push(xTicks(right, [tMin, (tMin + tMax) / 2, tMax], (v) => v.toFixed(2)));
  body.push(yTicks(right, [0, rightMax / 2, rightMax], (v) => v.toExponential(1)));
  body.push(text(right.x + right.width - 8, right.y + 16, "E(0)", "end", 10));

  return {
    svg: svgDocument(900, 420, body),
    sidecar: sidecarLines.join("\n") + "\n",
  };
}
