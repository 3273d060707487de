"""Bit-specified output formats: diagnostics CSV and field snapshots.

All floats are serialized with 17 significant digits so a parse-back
reproduces every value to the last bit.  The diagnostics header is part of
the format contract and is pinned by tests.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import DiagnosticsRecord
from .mesh import Mesh

__all__ = ["DIAG_HEADER", "write_diagnostics", "read_diagnostics",
           "write_snapshot", "read_snapshot", "SnapshotError"]

DIAG_HEADER = ("t,u_H,grad_u_L2,Au_H,q_L1,q_L2,q_L4,q_Linf,"
               "q_D05,q_D1,q_D15,q_D2,lam_q_L4,energy_residual,dissipation_u,dissipation_q")

_COLUMNS = DIAG_HEADER.split(",")


class SnapshotError(ValueError):
    """Snapshot file and its JSON sidecar disagree or are malformed."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_diagnostics(records, path) -> Path:
    """Write DiagnosticsRecord rows with the exact pinned header."""
    if not records:
        raise ValueError("no diagnostics records to write")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [DIAG_HEADER]
    for rec in records:
        d = asdict(rec)
        lines.append(",".join(_fmt(d[c]) for c in _COLUMNS))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_diagnostics(path) -> dict[str, np.ndarray]:
    """Columns of a diagnostics CSV, validated against the pinned header."""
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0] != DIAG_HEADER:
        raise ValueError(f"{path}: not a diagnostics CSV (bad header)")
    rows = [list(map(float, line.split(","))) for line in text[1:]]
    data = np.array(rows, dtype=float).reshape(-1, len(_COLUMNS))
    return {c: data[:, i] for i, c in enumerate(_COLUMNS)}


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def write_snapshot(field, mesh: Mesh, path, time: float, field_name: str) -> Path:
    """Field values with coordinates, plus a JSON sidecar describing the run."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    field = np.asarray(field, dtype=float)
    if field.shape != (mesh.n_interior,):
        raise ValueError(f"field shape {field.shape} does not match mesh ({mesh.n_interior} nodes)")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value"])
        for (x, y), v in zip(mesh.points, field):
            w.writerow([_fmt(x), _fmt(y), _fmt(v)])
    meta = {
        "time": time,
        "field_name": field_name,
        "mesh_params": {
            "kind": mesh.kind,
            "params": list(mesh.params),
            "shape": list(mesh.shape),
        },
        "code_version": __version__,
    }
    _sidecar(path).write_text(json.dumps(meta, indent=2, sort_keys=True))
    return path


def read_snapshot(path):
    """(points, values, meta) from a snapshot CSV and its sidecar."""
    path = Path(path)
    side = _sidecar(path)
    if not side.exists():
        raise SnapshotError(f"missing sidecar {side}")
    try:
        meta = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"corrupt sidecar {side}: {exc}") from exc
    for key in ("time", "field_name", "mesh_params", "code_version"):
        if key not in meta:
            raise SnapshotError(f"sidecar {side} missing key {key!r}")
    with path.open() as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["x", "y", "value"]:
        raise SnapshotError(f"{path}: bad snapshot header")
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    expected = int(np.prod(meta["mesh_params"]["shape"]))
    if data.shape[0] != expected:
        raise SnapshotError(
            f"{path}: {data.shape[0]} rows but sidecar mesh has {expected} nodes"
        )
    return data[:, :2], data[:, 2], meta
