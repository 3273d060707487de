// Declarative figure specs, dispatched to the three renderers.

import { plotField } from "./field.js";
import { plotHistogram } from "./histogram.js";
import { plotTimeseries } from "./timeseries.js";

export type FigureKind = "timeseries" | "field" | "histogram";

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  columns?: string[];   // timeseries
  column?: string;      // histogram
  logY?: boolean;
  bins?: number;
}

export function renderFigure(spec: FigureSpec): unknown {
  switch (spec.kind) {
    case "timeseries":
      if (!spec.columns || spec.columns.length === 0) {
        throw new Error("timeseries figure needs a nonempty 'columns' list");
      }
      return plotTimeseries(spec.input, spec.columns, spec.output, { logY: spec.logY });
    case "field":
      return plotField(spec.input, spec.output);
    case "histogram":
      if (!spec.column) throw new Error("histogram figure needs a 'column'");
      return plotHistogram(spec.input, spec.column, spec.output, spec.bins ?? 20);
    default:
      throw new Error(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
}
