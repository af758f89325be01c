/** Render one figure: --kind K --in a.csv[,b.csv] --out figure.svg */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname } from "node:path";
import { parseCsv } from "./csv.js";
import { FIGURE_KINDS, renderFigure } from "./figures.js";

function usage(): never {
  console.error(
    `usage: node dist/cli.js --kind <${FIGURE_KINDS.join("|")}> ` +
      `--in a.csv[,b.csv] --out figure.svg`,
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || argv[i + 1] === undefined) usage();
    args.set(argv[i].slice(2), argv[i + 1]);
  }
  const kind = args.get("kind");
  const input = args.get("in");
  const output = args.get("out");
  if (!kind || !input || !output) usage();
  try {
    const tables = input
      .split(",")
      .map((p) => parseCsv(readFileSync(p, "utf8"), p));
    const result = renderFigure(kind, tables);
    mkdirSync(dirname(output), { recursive: true });
    writeFileSync(output, result.svg);
    console.log(`wrote ${output}`);
    for (const a of result.annotations) console.log(`  ${a}`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
