/** Minimal SVG plot builder: axes, polylines, annotations. No DOM needed. */

export type ScaleKind = "linear" | "log";

export interface Scale {
  kind: ScaleKind;
  domain: [number, number];
  range: [number, number];
  map(v: number): number;
  ticks(): number[];
}

export function makeScale(
  kind: ScaleKind,
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  if (kind === "log" && (d0 <= 0 || d1 <= 0)) {
    throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const t = (v: number) => (kind === "log" ? Math.log10(v) : v);
  const a = t(d0);
  const b = t(d1);
  const span = b - a || 1;
  return {
    kind,
    domain,
    range,
    map(v: number): number {
      return range[0] + ((t(v) - a) / span) * (range[1] - range[0]);
    },
    ticks(): number[] {
      if (kind === "log") {
        const lo = Math.ceil(Math.min(a, b));
        const hi = Math.floor(Math.max(a, b));
        const out: number[] = [];
        for (let e = lo; e <= hi; e++) out.push(10 ** e);
        if (out.length === 0) out.push(d0, d1);
        return out;
      }
      const n = 5;
      const step = (d1 - d0) / n;
      return Array.from({ length: n + 1 }, (_, i) => d0 + i * step);
    },
  };
}

export const PALETTE = ["#1f5fa8", "#c5471f", "#2d8a4e", "#7b3ea8", "#b58500", "#4a4a4a"];

const W = 640;
const H = 440;
const MARGIN = { left: 72, right: 20, top: 44, bottom: 52 };

export interface Series {
  label: string;
  x: number[];
  y: number[];
  dashed?: boolean;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: ScaleKind;
  yScale: ScaleKind;
  series: Series[];
  annotations?: string[];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmtTick(v: number, kind: ScaleKind): string {
  if (kind === "log") {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  return Math.abs(v) >= 1e4 || (v !== 0 && Math.abs(v) < 1e-3)
    ? v.toExponential(1)
    : String(Math.round(v * 1000) / 1000);
}

export function renderPlot(spec: PlotSpec): string {
  const pts = spec.series.flatMap((s) => s.x.map((x, i) => [x, s.y[i]]));
  const usable = pts.filter(
    ([x, y]) =>
      Number.isFinite(x) &&
      Number.isFinite(y) &&
      (spec.xScale !== "log" || x > 0) &&
      (spec.yScale !== "log" || y > 0),
  );
  if (usable.length === 0) {
    throw new Error(`nothing to plot for '${spec.title}'`);
  }
  const xs = usable.map((p) => p[0]);
  const ys = usable.map((p) => p[1]);
  const pad = (lo: number, hi: number, kind: ScaleKind): [number, number] => {
    if (kind === "log") return [lo / 1.5, hi * 1.5];
    const d = (hi - lo) * 0.06 || Math.abs(hi) * 0.1 || 1;
    return [lo - d, hi + d];
  };
  const xscale = makeScale(
    spec.xScale,
    pad(Math.min(...xs), Math.max(...xs), spec.xScale),
    [MARGIN.left, W - MARGIN.right],
  );
  const yscale = makeScale(
    spec.yScale,
    pad(Math.min(...ys), Math.max(...ys), spec.yScale),
    [H - MARGIN.bottom, MARGIN.top],
  );

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
    `<text x="${W / 2}" y="22" text-anchor="middle" font-size="15">${esc(spec.title)}</text>`,
  );

  // axes box and ticks
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333"/>`,
  );
  for (const tv of xscale.ticks()) {
    if (tv < xscale.domain[0] || tv > xscale.domain[1]) continue;
    const px = xscale.map(tv);
    parts.push(
      `<line x1="${px.toFixed(1)}" y1="${y0}" x2="${px.toFixed(1)}" y2="${y0 + 5}" stroke="#333"/>`,
      `<text x="${px.toFixed(1)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmtTick(tv, spec.xScale)}</text>`,
    );
  }
  for (const tv of yscale.ticks()) {
    if (tv < yscale.domain[0] || tv > yscale.domain[1]) continue;
    const py = yscale.map(tv);
    parts.push(
      `<line x1="${x0 - 5}" y1="${py.toFixed(1)}" x2="${x0}" y2="${py.toFixed(1)}" stroke="#333"/>`,
      `<text x="${x0 - 8}" y="${(py + 4).toFixed(1)}" text-anchor="end" font-size="11">${fmtTick(tv, spec.yScale)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${H - 14}" text-anchor="middle" font-size="13">${esc(spec.xLabel)}</text>`,
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${(y0 + y1) / 2})">${esc(spec.yLabel)}</text>`,
  );

  // series
  spec.series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    const coords: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const vx = s.x[i];
      const vy = s.y[i];
      if (!Number.isFinite(vx) || !Number.isFinite(vy)) continue;
      if (spec.xScale === "log" && vx <= 0) continue;
      if (spec.yScale === "log" && vy <= 0) continue;
      coords.push(`${xscale.map(vx).toFixed(2)},${yscale.map(vy).toFixed(2)}`);
    }
    const dash = s.dashed ? ` stroke-dasharray="6 4"` : "";
    parts.push(
      `<polyline points="${coords.join(" ")}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`,
    );
    parts.push(
      `<text x="${x1 - 8}" y="${y1 + 16 + 15 * si}" text-anchor="end" font-size="12" fill="${color}">${esc(s.label)}</text>`,
    );
  });

  // annotations (bottom-left block)
  (spec.annotations ?? []).forEach((a, i) => {
    parts.push(
      `<text x="${x0 + 10}" y="${y1 + 16 + 14 * i}" font-size="12" fill="#222">${esc(a)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
