// Independent least-squares fit of log(gap) against log(eps).  This
// intentionally duplicates the harness's fit as a cross-language check:
// same canonical ordering (descending eps), same mean-centered formulas.

export interface LogLogFit {
  slope: number;
  intercept: number;
  rSquared: number;
}

export function logLogFit(points: Array<[number, number]>): LogLogFit {
  if (points.length < 3) {
    throw new Error(`need at least 3 points, got ${points.length}`);
  }
  for (const [eps, gap] of points) {
    if (!(eps > 0 && gap > 0)) {
      throw new Error(`non-positive point (${eps}, ${gap})`);
    }
  }
  const ordered = [...points].sort((a, b) => b[0] - a[0]);
  const x = ordered.map((p) => Math.log(p[0]));
  const y = ordered.map((p) => Math.log(p[1]));
  const xMean = x.reduce((a, b) => a + b, 0) / x.length;
  const yMean = y.reduce((a, b) => a + b, 0) / y.length;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < x.length; i++) {
    sxx += (x[i] - xMean) ** 2;
    sxy += (x[i] - xMean) * (y[i] - yMean);
  }
  const slope = sxy / sxx;
  const intercept = yMean - slope * xMean;
  let ssRes = 0;
  let ssTot = 0;
  for (let i = 0; i < x.length; i++) {
    ssRes += (y[i] - (slope * x[i] + intercept)) ** 2;
    ssTot += (y[i] - yMean) ** 2;
  }
  const rSquared = ssTot === 0 && ssRes === 0 ? 1 : 1 - ssRes / ssTot;
  return { slope, intercept, rSquared };
}
