// Batch figure CLI:
//   node dist/cli.js timeseries --in diag.csv --columns q_L2,u_H --out fig.png [--log]
//   node dist/cli.js field      --in snap_charge_t0.5.csv --out fig.png
//   node dist/cli.js histogram  --in sweep.csv --column ratio --out fig.png [--bins 30]

import { renderFigure, FigureSpec } from "./figure.js";

function parseArgs(argv: string[]): FigureSpec {
  const kind = argv[0] as FigureSpec["kind"];
  if (!["timeseries", "field", "histogram"].includes(kind)) {
    throw new Error(`usage: plot <timeseries|field|histogram> --in PATH --out PNG [options]`);
  }
  const spec: FigureSpec = { kind, input: "", output: "" };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new Error(`flag ${flag} needs a value`);
      return argv[++i];
    };
    switch (flag) {
      case "--in": spec.input = next(); break;
      case "--out": spec.output = next(); break;
      case "--columns": spec.columns = next().split(","); break;
      case "--column": spec.column = next(); break;
      case "--bins": spec.bins = Number(next()); break;
      case "--log": spec.logY = true; break;
      default: throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!spec.input || !spec.output) throw new Error("--in and --out are required");
  return spec;
}

export function main(argv: string[]): number {
  try {
    const result = renderFigure(parseArgs(argv)) as { outPath?: string; rates?: Record<string, number> };
    if (result.rates && Object.keys(result.rates).length > 0) {
      for (const [col, rate] of Object.entries(result.rates)) {
        console.log(`${col}: fitted decay rate ${rate}`);
      }
    }
    console.log(`wrote ${result.outPath}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
