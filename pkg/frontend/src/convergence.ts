// Log-log convergence figure: (epsilon, sup_gap) scatter with an
// independently recomputed least-squares line and the slope annotated.

import { column, fmt, parseCsv } from "./csv.js";
import { logLogFit } from "./fit.js";
import {
  Panel,
  circles,
  frame,
  polyline,
  svgDocument,
  text,
  xTicks,
  yTicks,
} from "./svg.js";

export interface ConvergenceOutput {
  svg: string;
  sidecar: string;
  slopeLabel: string;
}

export function buildConvergence(csvText: string): ConvergenceOutput {
  const table = parseCsv(csvText);
  const epsilons = column(table, "epsilon");
  const gaps = column(table, "sup_gap");
  if (epsilons.length < 1) {
    throw new Error("summary CSV has no data rows");
  }

  const fittable =
    epsilons.length >= 3 && epsilons.every((e, i) => e > 0 && gaps[i] > 0);
  const fit = fittable
    ? logLogFit(epsilons.map((e, i) => [e, gaps[i]] as [number, number]))
    : null;
  const slopeLabel = fit ? fit.slope.toFixed(6) : "n/a";

  const sidecarLines: string[] = [];
  sidecarLines.push(`# slope,${fit ? fmt(fit.slope) : "n/a"}`);
  sidecarLines.push(`# intercept,${fit ? fmt(fit.intercept) : "n/a"}`);
  sidecarLines.push(`# r_squared,${fit ? fmt(fit.rSquared) : "n/a"}`);
  sidecarLines.push(fit ? "epsilon,sup_gap,fit" : "epsilon,sup_gap");
  for (let i = 0; i < epsilons.length; i++) {
    const cols = [fmt(epsilons[i]), fmt(gaps[i])];
    if (fit) {
      cols.push(fmt(Math.exp(fit.intercept + fit.slope * Math.log(epsilons[i]))));
    }
    sidecarLines.push(cols.join(","));
  }

  const logE = epsilons.map(Math.log10);
  const logG = gaps.map((g) => (g > 0 ? Math.log10(g) : 0));
  const padded = (vals: number[]) => {
    const lo = Math.min(...vals);
    const hi = Math.max(...vals);
    const pad = (hi - lo || 1) * 0.1;
    return [lo - pad, hi + pad];
  };
  const [xMin, xMax] = padded(logE);
  const [yMin, yMax] = padded(logG);
  const panel: Panel = {
    x: 70,
    y: 30,
    width: 420,
    height: 330,
    xMin,
    xMax,
    yMin,
    yMax,
  };

  const body: string[] = [frame(panel)];
  body.push(xTicks(panel, logE, (v) => `1e${v.toFixed(2)}`));
  body.push(yTicks(panel, [yMin, (yMin + yMax) / 2, yMax], (v) => `1e${v.toFixed(1)}`));
  if (fit) {
    const fitY = logE.map(
      (le) => (fit.intercept + fit.slope * le * Math.LN10) / Math.LN10,
    );
    body.push(polyline(panel, logE, fitY, "#d62728"));
  }
  body.push(circles(panel, logE, logG, "#1f77b4"));
  body.push(text(panel.x + 10, panel.y + 18, `slope = ${slopeLabel}`));
  body.push(text(280, 395, "epsilon (log scale)", "middle"));
  body.push(
    `<g transform="rotate(-90 18 210)">${text(18, 210, "sup gap (log scale)", "middle")}</g>`,
  );

  return {
    svg: svgDocument(520, 410, body),
    sidecar: sidecarLines.join("\n") + "\n",
    slopeLabel,
  };
}
