// Strict readers for the simulator's CSV output formats.
// Diagnostics files carry a fixed header; snapshots are x,y,value tables with
// a JSON sidecar describing time, field name, and mesh geometry.

import { readFileSync, existsSync } from "fs";

export const DIAG_HEADER =
  "t,u_H,grad_u_L2,Au_H,q_L1,q_L2,q_L4,q_Linf," +
  "q_D05,q_D1,q_D15,q_D2,lam_q_L4,energy_residual,dissipation_u,dissipation_q";

export interface Table {
  columns: string[];
  data: Map<string, Float64Array>;
  rows: number;
}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8").trim();
  if (text.length === 0) throw new Error(`${path}: empty CSV`);
  const lines = text.split(/\r?\n/);
  const columns = lines[0].split(",");
  if (lines.length < 2) throw new Error(`${path}: CSV has a header but no data rows`);
  const rows = lines.length - 1;
  const cols = columns.map(() => new Float64Array(rows));
  for (let i = 0; i < rows; i++) {
    const parts = lines[i + 1].split(",");
    if (parts.length !== columns.length) {
      throw new Error(`${path}: row ${i + 1} has ${parts.length} fields, expected ${columns.length}`);
    }
    for (let j = 0; j < columns.length; j++) {
      const v = Number(parts[j]);
      if (Number.isNaN(v)) throw new Error(`${path}: non-numeric value '${parts[j]}' at row ${i + 1}`);
      cols[j][i] = v;
    }
  }
  const data = new Map<string, Float64Array>();
  columns.forEach((c, j) => data.set(c, cols[j]));
  return { columns, data, rows };
}

export function requireColumns(table: Table, wanted: string[], path: string): void {
  for (const c of wanted) {
    if (!table.data.has(c)) {
      throw new Error(`${path}: column '${c}' not present (header: ${table.columns.join(",")})`);
    }
  }
}

export interface MeshParams {
  kind: "rectangle" | "annulus";
  params: number[];
  shape: number[];
}

export interface Snapshot {
  x: Float64Array;
  y: Float64Array;
  value: Float64Array;
  time: number;
  fieldName: string;
  mesh: MeshParams;
  codeVersion: string;
}

function sidecarPath(csvPath: string): string {
  return csvPath.replace(/\.csv$/, ".json");
}

export function readSnapshot(path: string): Snapshot {
  const side = sidecarPath(path);
  if (!existsSync(side)) throw new Error(`missing sidecar ${side}`);
  let meta: any;
  try {
    meta = JSON.parse(readFileSync(side, "utf8"));
  } catch (err) {
    throw new Error(`corrupt sidecar ${side}: ${(err as Error).message}`);
  }
  for (const key of ["time", "field_name", "mesh_params", "code_version"]) {
    if (!(key in meta)) throw new Error(`sidecar ${side} missing key '${key}'`);
  }
  const table = readCsv(path);
  requireColumns(table, ["x", "y", "value"], path);
  const expected = (meta.mesh_params.shape as number[]).reduce((a, b) => a * b, 1);
  if (table.rows !== expected) {
    throw new Error(`${path}: ${table.rows} rows but sidecar mesh has ${expected} nodes`);
  }
  return {
    x: table.data.get("x")!,
    y: table.data.get("y")!,
    value: table.data.get("value")!,
    time: meta.time,
    fieldName: meta.field_name,
    mesh: meta.mesh_params,
    codeVersion: meta.code_version,
  };
}
