/** Walk a diagnostics output tree and render every recognized CSV. */

import { readFileSync, writeFileSync, mkdirSync, readdirSync, statSync } from "node:fs";
import { join, relative } from "node:path";
import { parseCsv, Table } from "./csv.js";
import { renderFigure, FigureKind } from "./figures.js";

const BY_NAME: Record<string, FigureKind> = {
  "operator_error.csv": "operator-error",
  "equilibrium.csv": "equilibrium-tail",
  "relaxation.csv": "entropy-decay",
  "ap_series.csv": "energy-traces",
  "eps_sweep.csv": "eps-sweep",
  "dt_refinement.csv": "dt-refinement",
  "rho_final.csv": "density-compare",
};

function* walk(dir: string): Generator<string> {
  for (const entry of readdirSync(dir)) {
    const p = join(dir, entry);
    if (statSync(p).isDirectory()) yield* walk(p);
    else yield p;
  }
}

export function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) args.set(argv[i]?.slice(2), argv[i + 1]);
  const input = args.get("in") ?? "out";
  const output = args.get("out") ?? join(input, "figures");
  let count = 0;
  let failures = 0;
  for (const path of walk(input)) {
    const base = path.split("/").pop()!;
    const kind = BY_NAME[base];
    if (!kind) continue;
    try {
      const table: Table = parseCsv(readFileSync(path, "utf8"), path);
      const result = renderFigure(kind, [table]);
      const rel = relative(input, path).replace(/[\\/]/g, "_").replace(/\.csv$/, ".svg");
      const target = join(output, rel);
      mkdirSync(output, { recursive: true });
      writeFileSync(target, result.svg);
      console.log(`wrote ${target}`);
      count += 1;
    } catch (err) {
      failures += 1;
      console.error(`failed on ${path}: ${err instanceof Error ? err.message : err}`);
    }
  }
  console.log(`${count} figures rendered, ${failures} failures`);
  return failures === 0 && count > 0 ? 0 : 1;
}

if (process.argv[1] && process.argv[1].endsWith("render_all.js")) {
  process.exit(main(process.argv.slice(2)));
}
