// Pseudocolor snapshot rendering in physical coordinates.  Annulus snapshots
// keep their hole: pixels with no nearby node stay at the background color.

import { readSnapshot, Snapshot } from "./csv.js";
import { BLACK, colormap, Raster, WHITE } from "./raster.js";

export interface FieldResult {
  outPath: string;
  snapshot: Snapshot;
  canvas: Raster;
}

export function plotField(snapshotPath: string, outPng: string, size = 480): FieldResult {
  const snap = readSnapshot(snapshotPath);
  const n = snap.value.length;
  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (let i = 0; i < n; i++) {
    xmin = Math.min(xmin, snap.x[i]); xmax = Math.max(xmax, snap.x[i]);
    ymin = Math.min(ymin, snap.y[i]); ymax = Math.max(ymax, snap.y[i]);
  }
  const range = Math.max(xmax - xmin, ymax - ymin) || 1;
  const margin = 24;
  const scale = (size - 2 * margin) / range;
  const px = (x: number) => margin + (x - xmin) * scale;
  const py = (y: number) => size - margin - (y - ymin) * scale;

  let vmin = Infinity, vmax = -Infinity;
  for (const v of snap.value) { vmin = Math.min(vmin, v); vmax = Math.max(vmax, v); }
  const span = vmax - vmin || 1;

  // node footprint from the mesh descriptor so splats tile without gaps
  const [n1, n2] = snap.mesh.shape;
  let splat: (i: number) => number;
  if (snap.mesh.kind === "rectangle") {
    const side = Math.ceil(scale * Math.max((xmax - xmin) / Math.max(1, n1 - 1),
                                            (ymax - ymin) / Math.max(1, n2 - 1)));
    splat = () => Math.max(2, side);
  } else {
    const [rIn, rOut] = snap.mesh.params;
    const hr = (rOut - rIn) / (n1 + 1);
    const ht = (2 * Math.PI) / n2;
    splat = (i: number) => {
      const r = Math.hypot(snap.x[i], snap.y[i]);
      return Math.max(2, Math.ceil(scale * Math.max(hr, r * ht)));
    };
  }

  const canvas = new Raster(size, size, WHITE);
  for (let i = 0; i < n; i++) {
    const s = splat(i);
    const c = colormap((snap.value[i] - vmin) / span);
    canvas.fillRect(Math.round(px(snap.x[i]) - s / 2), Math.round(py(snap.y[i]) - s / 2), s, s, c);
  }
  canvas.text(8, 6, `${snap.fieldName} t=${snap.time.toPrecision(4)}`, BLACK);
  canvas.text(8, size - 14, `min=${vmin.toPrecision(3)} max=${vmax.toPrecision(3)}`, BLACK);
  canvas.writePng(outPng);
  return { outPath: outPng, snapshot: snap, canvas };
}
