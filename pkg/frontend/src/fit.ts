/** Least-squares line fits used for slope annotations. */

export interface Fit {
  slope: number;
  intercept: number;
  r2: number;
}

export function linearFit(x: number[], y: number[]): Fit {
  const n = x.length;
  if (n !== y.length || n < 2) {
    throw new Error(`need at least two matched points, got ${n}/${y.length}`);
  }
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) ** 2;
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) ** 2;
  }
  if (sxx === 0) throw new Error("degenerate fit: all x identical");
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  const r2 = syy === 0 ? 1 : (sxy * sxy) / (sxx * syy);
  return { slope, intercept, r2 };
}

/** Fit in log-log space over points with positive coordinates. */
export function logLogFit(x: number[], y: number[]): Fit {
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < x.length; i++) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push(Math.log(x[i]));
      ly.push(Math.log(y[i]));
    }
  }
  return linearFit(lx, ly);
}

/** Fit of log(y) against x over points with positive y. */
export function semilogFit(x: number[], y: number[]): Fit {
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < x.length; i++) {
    if (y[i] > 0) {
      lx.push(x[i]);
      ly.push(Math.log(y[i]));
    }
  }
  return linearFit(lx, ly);
}
