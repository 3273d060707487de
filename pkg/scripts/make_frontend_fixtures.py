#!/usr/bin/env python3
"""Regenerate the frontend test fixtures through the simulator CLI.

The plotting component consumes only the documented file formats, so its test
inputs are produced by real CLI runs; run this after any format change:

    python3 scripts/make_frontend_fixtures.py
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

from electroconvect.cli import main

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "frontend" / "test" / "fixtures"


def run(args):
    code = main(args)
    if code != 0:
        sys.exit(f"fixture command failed ({code}): {args}")


def main_():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)

        decoupled = {
            "mesh": {"kind": "rectangle", "nx": 32, "ny": 32},
            "modes": {"m_velocity": 4, "n_charge": 4},
            "time": {"dt": 0.01, "t_end": 1.0, "diag_every": 2},
            "initial_data": {"velocity": "zero", "charge": "eigen:1"},
            "toggles": {"coupling_on": False, "transport_on": False},
        }
        cfg = tmp / "decoupled.json"
        cfg.write_text(json.dumps(decoupled))
        out = tmp / "decoupled"
        run(["run", "--config", str(cfg), "--out", str(out)])
        dest = FIXTURES / "decoupled"
        dest.mkdir(exist_ok=True)
        shutil.copy(out / "diagnostics.csv", dest / "diagnostics.csv")

        square = {
            "mesh": {"kind": "rectangle", "nx": 24, "ny": 24},
            "modes": {"m_velocity": 4, "n_charge": 4},
            "time": {"dt": 0.01, "t_end": 0.02, "diag_every": 1, "snapshot_times": [0.0]},
            "initial_data": {"velocity": "zero", "charge": "eigen:1"},
            "toggles": {"coupling_on": False, "transport_on": False},
        }
        cfg = tmp / "square.json"
        cfg.write_text(json.dumps(square))
        out = tmp / "square"
        run(["run", "--config", str(cfg), "--out", str(out)])
        dest = FIXTURES / "square"
        dest.mkdir(exist_ok=True)
        for name in ("snap_charge_t0.000000.csv", "snap_charge_t0.000000.json"):
            shutil.copy(out / name, dest / name)

        annulus = {
            "mesh": {"kind": "annulus", "nr": 24, "ntheta": 32},
            "modes": {"m_velocity": 4, "n_charge": 6},
            "time": {"dt": 0.01, "t_end": 0.02, "diag_every": 1, "snapshot_times": [0.0]},
            "initial_data": {"velocity": "zero", "charge": "gaussian-blob(1.5,0.0,0.3,1.0)"},
            "toggles": {"coupling_on": False, "transport_on": False},
        }
        cfg = tmp / "annulus.json"
        cfg.write_text(json.dumps(annulus))
        out = tmp / "annulus"
        run(["run", "--config", str(cfg), "--out", str(out)])
        dest = FIXTURES / "annulus"
        dest.mkdir(exist_ok=True)
        for name in ("snap_charge_t0.000000.csv", "snap_charge_t0.000000.json"):
            shutil.copy(out / name, dest / name)

        run(["sweep", "--kind", "commutator", "--grid", "16", "--samples", "40",
             "--out", str(tmp / "sweep")])
        dest = FIXTURES / "sweep"
        dest.mkdir(exist_ok=True)
        shutil.copy(tmp / "sweep" / "commutator_grid16.csv", dest / "commutator_grid16.csv")

    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main_()
