// Histogram figures for measured-constant sweep output.

import { readCsv, requireColumns } from "./csv.js";
import { BLACK, GREY, Raster, SERIES_COLORS, WHITE } from "./raster.js";

export interface HistogramResult {
  outPath: string;
  counts: number[];
  edges: number[];
}

export function plotHistogram(
  csvPath: string,
  column: string,
  outPng: string,
  bins = 20,
  width = 520,
  height = 360,
): HistogramResult {
  const table = readCsv(csvPath);
  requireColumns(table, [column], csvPath);
  const values = table.data.get(column)!;
  let lo = Infinity, hi = -Infinity;
  for (const v of values) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  if (hi === lo) hi = lo + 1;
  const counts = new Array(bins).fill(0);
  for (const v of values) {
    const b = Math.min(bins - 1, Math.floor(((v - lo) / (hi - lo)) * bins));
    counts[b]++;
  }
  const edges = Array.from({ length: bins + 1 }, (_, i) => lo + ((hi - lo) * i) / bins);

  const margin = { left: 40, right: 10, top: 16, bottom: 26 };
  const canvas = new Raster(width, height, WHITE);
  const peak = Math.max(...counts, 1);
  const bw = (width - margin.left - margin.right) / bins;
  for (let b = 0; b < bins; b++) {
    const h = Math.round(((height - margin.top - margin.bottom) * counts[b]) / peak);
    canvas.fillRect(
      Math.round(margin.left + b * bw) + 1,
      height - margin.bottom - h,
      Math.max(1, Math.floor(bw) - 2),
      h,
      SERIES_COLORS[0],
    );
  }
  canvas.line(margin.left, margin.top, margin.left, height - margin.bottom, BLACK);
  canvas.line(margin.left, height - margin.bottom, width - margin.right, height - margin.bottom, BLACK);
  canvas.text(margin.left - 4, height - margin.bottom + 6, lo.toPrecision(3), GREY);
  canvas.text(width - margin.right - 50, height - margin.bottom + 6, hi.toPrecision(3), GREY);
  canvas.text(margin.left + 8, margin.top - 10, `${column} (n=${values.length})`, BLACK);
  canvas.writePng(outPng);
  return { outPath: outPng, counts, edges };
}
