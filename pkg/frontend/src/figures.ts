/** Figure kinds mapping diagnostics CSVs to annotated SVG plots. */

import { Table, column, hasColumn } from "./csv.js";
import { logLogFit, semilogFit } from "./fit.js";
import { PlotSpec, Series, renderPlot } from "./svg.js";

export const FIGURE_KINDS = [
  "operator-error",
  "equilibrium-tail",
  "entropy-decay",
  "energy-traces",
  "density-compare",
  "ap-error",
  "eps-sweep",
  "dt-refinement",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureResult {
  svg: string;
  annotations: string[];
  fits: Record<string, number>;
}

function build(spec: PlotSpec, fits: Record<string, number>): FigureResult {
  return { svg: renderPlot(spec), annotations: spec.annotations ?? [], fits };
}

function operatorError(tables: Table[]): FigureResult {
  const t = tables[0];
  const fam = column(t, "family");
  const s = column(t, "s");
  const N = column(t, "N_v");
  const err = column(t, "sup_err");
  const keys = new Map<string, { x: number[]; y: number[] }>();
  for (let i = 0; i < fam.length; i++) {
    const label = `${fam[i] === 0 ? "exp" : "power-law"} s=${s[i]}`;
    if (!keys.has(label)) keys.set(label, { x: [], y: [] });
    keys.get(label)!.x.push(N[i]);
    keys.get(label)!.y.push(Math.max(err[i], 1e-16));
  }
  const series: Series[] = [...keys.entries()].map(([label, d]) => ({
    label,
    ...d,
  }));
  return build(
    {
      title: "Operator error vs velocity resolution",
      xLabel: "N_v",
      yLabel: "sup error (|v| <= 10)",
      xScale: "log",
      yScale: "log",
      series,
    },
    {},
  );
}

function equilibriumTail(tables: Table[]): FigureResult {
  const t = tables[0];
  const v = column(t, "v");
  const M = column(t, "M");
  const pos = v
    .map((vi, i) => [vi, M[i]])
    .filter(([vi, mi]) => vi > 0 && mi > 0)
    .sort((a, b) => a[0] - b[0]);
  const x = pos.map((p) => p[0]);
  const y = pos.map((p) => p[1]);
  const vmax = Math.max(...x);
  const tx: number[] = [];
  const ty: number[] = [];
  for (let i = 0; i < x.length; i++) {
    if (x[i] >= vmax / 10 && x[i] < vmax) {
      tx.push(x[i]);
      ty.push(y[i]);
    }
  }
  const fit = logLogFit(tx, ty);
  const line: Series = {
    label: `fit slope ${fit.slope.toFixed(2)}`,
    x: tx,
    y: tx.map((xx) => Math.exp(fit.intercept + fit.slope * Math.log(xx))),
    dashed: true,
  };
  const ann = [`tail slope ${fit.slope.toFixed(3)} over [${(vmax / 10).toFixed(1)}, ${vmax.toFixed(1)}]`];
  if (t.meta.s) ann.push(`expected -(1+2s) = ${-(1 + 2 * Number(t.meta.s))}`);
  return build(
    {
      title: "Equilibrium tail",
      xLabel: "v",
      yLabel: "M(v)",
      xScale: "log",
      yScale: "log",
      series: [{ label: "equilibrium", x, y }, line],
      annotations: ann,
    },
    { tail_slope: fit.slope },
  );
}

function entropyDecay(tables: Table[]): FigureResult {
  const t = tables[0];
  const time = column(t, "t");
  const H = column(t, "H");
  const tconv = t.meta.t_converged ? Number(t.meta.t_converged) : Math.max(...time);
  const wx: number[] = [];
  const wy: number[] = [];
  const href = H.find((_, i) => time[i] >= 0.5) ?? H[0];
  for (let i = 0; i < time.length; i++) {
    if (time[i] >= 0.5 && time[i] <= Math.min(4.0, 0.8 * tconv) && H[i] > href * 1e-3) {
      wx.push(time[i]);
      wy.push(H[i]);
    }
  }
  const fit = semilogFit(wx, wy);
  const line: Series = {
    label: `rate ${fit.slope.toFixed(2)}`,
    x: wx,
    y: wx.map((xx) => Math.exp(fit.intercept + fit.slope * xx)),
    dashed: true,
  };
  return build(
    {
      title: "Relative entropy decay",
      xLabel: "t",
      yLabel: "H",
      xScale: "linear",
      yScale: "log",
      series: [{ label: "H(t)", x: time, y: H }, line],
      annotations: [
        `decay rate ${fit.slope.toFixed(3)}, R^2 = ${fit.r2.toFixed(4)}`,
      ],
    },
    { rate: fit.slope, r2: fit.r2 },
  );
}

function energyTraces(tables: Table[]): FigureResult {
  const t = tables[0];
  const time = column(t, "t");
  const series: Series[] = ["E_f", "E_g", "E_eta"].map((name) => ({
    label: name,
    x: time,
    y: column(t, name),
  }));
  return build(
    {
      title: "Energy traces",
      xLabel: "t",
      yLabel: "energy",
      xScale: "linear",
      yScale: "log",
      series,
    },
    {},
  );
}

function densityCompare(tables: Table[]): FigureResult {
  const series: Series[] = tables.map((t, i) => ({
    label: t.meta.mode ? `${t.meta.mode}` : `series ${i + 1}`,
    x: column(t, "x"),
    y: column(t, "rho"),
    dashed: i > 0,
  }));
  let ann: string[] = [];
  if (tables.length === 2) {
    const x = column(tables[0], "x");
    const a = column(tables[0], "rho");
    const b = column(tables[1], "rho");
    if (a.length === b.length && x.length > 1) {
      const dx = x[1] - x[0];
      const l1 = a.reduce((acc, ai, i) => acc + Math.abs(ai - b[i]) * dx, 0);
      ann = [`L1 difference ${l1.toExponential(2)}`];
    }
  }
  return build(
    {
      title: "Density comparison",
      xLabel: "x",
      yLabel: "rho",
      xScale: "linear",
      yScale: "linear",
      series,
      annotations: ann,
    },
    {},
  );
}

function apError(tables: Table[]): FigureResult {
  const t = tables[0];
  const time = column(t, "t");
  const err = column(t, "ap_error");
  return build(
    {
      title: "Distance to local equilibrium",
      xLabel: "t",
      yLabel: "ap_error",
      xScale: "linear",
      yScale: "log",
      series: [{ label: "ap_error", x: time, y: err }],
    },
    {},
  );
}

function epsSweep(tables: Table[]): FigureResult {
  const t = tables[0];
  const eps = column(t, "eps");
  const err = column(t, "ap_error");
  const fit = logLogFit(eps, err);
  const line: Series = {
    label: `order ${fit.slope.toFixed(2)}`,
    x: eps,
    y: eps.map((e) => Math.exp(fit.intercept + fit.slope * Math.log(e))),
    dashed: true,
  };
  return build(
    {
      title: "Asymptotic error vs stiffness",
      xLabel: "eps",
      yLabel: "ap_error",
      xScale: "log",
      yScale: "log",
      series: [{ label: "ap_error", x: eps, y: err }, line],
      annotations: [`empirical order ${fit.slope.toFixed(3)}`],
    },
    { order: fit.slope },
  );
}

function dtRefinement(tables: Table[]): FigureResult {
  const t = tables[0];
  const dt = column(t, "dt");
  const e = column(t, "e_dt");
  const fit = logLogFit(dt, e);
  const line: Series = {
    label: `slope ${fit.slope.toFixed(2)}`,
    x: dt,
    y: dt.map((d) => Math.exp(fit.intercept + fit.slope * Math.log(d))),
    dashed: true,
  };
  return build(
    {
      title: "Self-difference error vs time step",
      xLabel: "dt",
      yLabel: "e_dt",
      xScale: "log",
      yScale: "log",
      series: [{ label: "e_dt", x: dt, y: e }, line],
      annotations: [`slope ${fit.slope.toFixed(3)}`],
    },
    { slope: fit.slope },
  );
}

const RENDERERS: Record<FigureKind, (tables: Table[]) => FigureResult> = {
  "operator-error": operatorError,
  "equilibrium-tail": equilibriumTail,
  "entropy-decay": entropyDecay,
  "energy-traces": energyTraces,
  "density-compare": densityCompare,
  "ap-error": apError,
  "eps-sweep": epsSweep,
  "dt-refinement": dtRefinement,
};

export function renderFigure(kind: string, tables: Table[]): FigureResult {
  const fn = (RENDERERS as Record<string, (t: Table[]) => FigureResult>)[kind];
  if (!fn) {
    throw new Error(
      `unknown figure kind '${kind}' (known: ${FIGURE_KINDS.join(", ")})`,
    );
  }
  if (tables.length === 0) throw new Error("no input tables given");
  return fn(tables);
}
