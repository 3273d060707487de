// Time-series figures from diagnostics CSV files.  Log-scale decay plots fit
// and annotate the exponential rate of each column.

import { readCsv, requireColumns } from "./csv.js";
import { fitExponentialRate } from "./fit.js";
import { BLACK, GREY, Raster, SERIES_COLORS, WHITE } from "./raster.js";

export interface TimeseriesOptions {
  logY?: boolean;
  width?: number;
  height?: number;
}

export interface TimeseriesResult {
  outPath: string;
  rates: Record<string, number>;
  rows: number;
}

const MARGIN = { left: 56, right: 12, top: 14, bottom: 30 };

function niceLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return v.toPrecision(4);
  return v.toExponential(2);
}

export function plotTimeseries(
  csvPath: string,
  columns: string[],
  outPng: string,
  options: TimeseriesOptions = {},
): TimeseriesResult {
  if (columns.length === 0) throw new Error("no columns requested");
  const table = readCsv(csvPath);
  requireColumns(table, ["t", ...columns], csvPath);
  const t = table.data.get("t")!;
  const logY = options.logY ?? false;
  const W = options.width ?? 640;
  const H = options.height ?? 420;

  const series = columns.map((c) => table.data.get(c)!);
  const transform = (v: number) => (logY ? (v > 0 ? Math.log10(v) : NaN) : v);
  let lo = Infinity, hi = -Infinity;
  for (const s of series) {
    for (const v of s) {
      const w = transform(v);
      if (Number.isFinite(w)) {
        lo = Math.min(lo, w);
        hi = Math.max(hi, w);
      }
    }
  }
  if (!Number.isFinite(lo)) throw new Error(`${csvPath}: no plottable values (log scale with nonpositive data?)`);
  if (hi === lo) { hi += 1; lo -= 1; }
  const t0 = t[0], t1 = t[t.length - 1] === t0 ? t0 + 1 : t[t.length - 1];

  const px = (tv: number) => MARGIN.left + ((tv - t0) / (t1 - t0)) * (W - MARGIN.left - MARGIN.right);
  const py = (v: number) => H - MARGIN.bottom - ((v - lo) / (hi - lo)) * (H - MARGIN.top - MARGIN.bottom);

  const canvas = new Raster(W, H, WHITE);
  canvas.line(MARGIN.left, MARGIN.top, MARGIN.left, H - MARGIN.bottom, BLACK);
  canvas.line(MARGIN.left, H - MARGIN.bottom, W - MARGIN.right, H - MARGIN.bottom, BLACK);
  canvas.text(MARGIN.left - 4, H - MARGIN.bottom + 6, niceLabel(t0), GREY);
  canvas.text(W - MARGIN.right - 40, H - MARGIN.bottom + 6, niceLabel(t1), GREY);
  canvas.text(2, py(hi) - 3, niceLabel(logY ? 10 ** hi : hi), GREY);
  canvas.text(2, py(lo) - 3, niceLabel(logY ? 10 ** lo : lo), GREY);
  canvas.text(W / 2 - 6, H - 12, "t", BLACK);

  const rates: Record<string, number> = {};
  series.forEach((s, k) => {
    const color = SERIES_COLORS[k % SERIES_COLORS.length];
    let prev: [number, number] | null = null;
    for (let i = 0; i < s.length; i++) {
      const v = transform(s[i]);
      if (!Number.isFinite(v)) { prev = null; continue; }
      const pt: [number, number] = [px(t[i]), py(v)];
      if (prev) canvas.line(prev[0], prev[1], pt[0], pt[1], color);
      prev = pt;
    }
    let label = columns[k];
    if (logY) {
      const fit = fitExponentialRate(t, s);
      rates[columns[k]] = fit.rate;
      label += ` rate=${fit.rate.toPrecision(6)}`;
    }
    canvas.text(MARGIN.left + 8, MARGIN.top + 2 + 10 * k, label, color);
  });

  canvas.writePng(outPng);
  return { outPath: outPng, rates, rows: table.rows };
}
