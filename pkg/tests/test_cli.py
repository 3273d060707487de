import json

import numpy as np
import pytest

from electroconvect.cli import EXIT_BLOWUP, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main
from electroconvect.runio import read_diagnostics


def write_config(tmp_path, **overrides):
    doc = {
        "mesh": {"kind": "rectangle", "nx": 16, "ny": 16},
        "modes": {"m_velocity": 4, "n_charge": 4},
        "time": {"dt": 0.005, "t_end": 0.05, "diag_every": 2},
        "initial_data": {"velocity": "zero", "charge": "eigen:1"},
    }
    doc.update(overrides)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


def test_run_writes_diagnostics(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")])
    assert code == EXIT_OK
    cols = read_diagnostics(tmp_path / "out" / "diagnostics.csv")
    assert cols["t"][0] == 0.0
    assert cols["q_L2"][0] == pytest.approx(1.0, abs=1e-9)


def test_run_zero_data_zero_rows(tmp_path):
    cfg = write_config(tmp_path, initial_data={"velocity": "zero", "charge": "zero"})
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")]) == EXIT_OK
    cols = read_diagnostics(tmp_path / "out" / "diagnostics.csv")
    assert np.all(cols["u_H"] == 0.0)
    assert np.all(cols["q_L2"] == 0.0)


def test_run_deterministic_byte_identical(tmp_path):
    cfg = write_config(tmp_path, initial_data={"velocity": "random(5,0.4)",
                                               "charge": "random(6,0.4)"})
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "b"), "--seed", "1"])
    a = (tmp_path / "a" / "diagnostics.csv").read_bytes()
    b = (tmp_path / "b" / "diagnostics.csv").read_bytes()
    assert a == b


def test_run_snapshots_written(tmp_path):
    cfg = write_config(tmp_path, time={"dt": 0.005, "t_end": 0.05,
                                       "diag_every": 2, "snapshot_times": [0.025]})
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")]) == EXIT_OK
    assert (tmp_path / "out" / "snap_charge_t0.025000.csv").exists()
    assert (tmp_path / "out" / "snap_vorticity_t0.025000.json").exists()


def test_run_blowup_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "out"),
                 "--blowup-factor", "1e-9"])
    assert code == EXIT_BLOWUP
    assert "BLOW-UP" in capsys.readouterr().err


def test_run_bad_config_exit(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text('{"mesh": {"kind": "rectangle", "nx": 8, "ny": 8}, "viscosty": 1}')
    assert main(["run", "--config", str(path)]) == EXIT_USAGE
    assert "viscosty" in capsys.readouterr().err


def test_usage_error_exit():
    assert main(["run"]) == EXIT_USAGE          # missing --config
    assert main(["frobnicate"]) == EXIT_USAGE   # unknown subcommand


def test_eig_prints_closed_form(capsys):
    assert main(["eig", "--mesh", "square", "--size", "16", "--m", "5"]) == EXIT_OK
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.startswith("mu_")]
    values = np.array([float(l.split("=")[1]) for l in lines])
    h = 1.0 / 16
    kl = [(k, l) for k in range(1, 6) for l in range(1, 6)]
    exact = np.sort([(4 / h**2) * (np.sin(k * np.pi * h / 2) ** 2
                                   + np.sin(l * np.pi * h / 2) ** 2) for k, l in kl])[:5]
    assert np.abs(values - exact).max() / exact.max() < 1e-10


def test_eig_cache_used(tmp_path, capsys):
    args = ["eig", "--mesh", "square", "--size", "16", "--m", "3",
            "--cache", str(tmp_path)]
    assert main(args) == EXIT_OK
    first = capsys.readouterr().out
    assert main(args) == EXIT_OK  # second call hits the cache
    assert capsys.readouterr().out == first
    assert list(tmp_path.glob("*.npz"))


def test_verify_all_pass(capsys):
    assert main(["verify", "--size", "24"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "checks passed" in out


def test_sweep_writes_csv(tmp_path, capsys):
    code = main(["sweep", "--kind", "commutator", "--grid", "16",
                 "--samples", "5", "--out", str(tmp_path)])
    assert code == EXIT_OK
    text = (tmp_path / "commutator_grid16.csv").read_text().splitlines()
    assert text[0] == "sample,ratio"
    assert len(text) == 6


def test_sweep_inequalities(tmp_path):
    code = main(["sweep", "--kind", "inequalities", "--grid", "16",
                 "--samples", "4", "--out", str(tmp_path)])
    assert code == EXIT_OK
    header = (tmp_path / "inequalities_grid16.csv").read_text().splitlines()[0]
    assert header.startswith("sample,")
    assert "lfour" in header


def test_threads_env_caps_parallelism(monkeypatch):
    from electroconvect.sweeps import max_workers

    monkeypatch.setenv("ELECTROCONVECT_THREADS", "2")
    assert max_workers(8) == 2
    monkeypatch.setenv("ELECTROCONVECT_THREADS", "not-a-number")
    assert max_workers(8) >= 1
    monkeypatch.delenv("ELECTROCONVECT_THREADS")
    assert 1 <= max_workers(8) <= 8
