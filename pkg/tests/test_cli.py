import json
import subprocess
import sys

import pytest

from memristor1d import io as trace_io
from memristor1d.cli import main

FAST = ["--set", "dt=0.05"]


def test_simulate_writes_trace(tmp_path, capsys):
    code = main(["simulate", "--out", str(tmp_path), "--seed", "3", "--delta", "0.02",
                 "--ion-trace", *FAST])
    assert code == 0
    out = capsys.readouterr().out
    assert "loop_area=" in out
    tr = trace_io.read_trace_csv(tmp_path / "trace.csv")
    assert len(tr) == 181
    assert tr.ions.shape == (181, 20)
    meta = json.loads((tmp_path / "trace.meta.json").read_text())
    assert meta["seed"] == 3 and meta["delta"] == 0.02


def test_json_output_and_analyze(tmp_path, capsys):
    assert main(["c2c", "--cycles", "2", "--json", "--out", str(tmp_path), *FAST]) == 0
    assert (tmp_path / "c2c.json").exists()
    capsys.readouterr()
    assert main(["analyze", str(tmp_path / "c2c.json")]) == 0
    out = capsys.readouterr().out
    assert "c2c.json[1]" in out and "RSD reset-branch current" in out


def test_d2d_and_amplitude(tmp_path):
    assert main(["d2d", "--devices", "2", "--out", str(tmp_path), *FAST]) == 0
    assert (tmp_path / "d2d_device1.csv").exists()
    assert main(["amplitude-study", "--amplitudes", "2", "3", "--out", str(tmp_path),
                 *FAST]) == 0
    assert (tmp_path / "amplitude_3V.csv").exists()


def test_grid_dump_flag(tmp_path):
    assert main(["simulate", "--grid-dump", "--out", str(tmp_path), "--set", "t_max=0.03",
                 "--set", "n_grid=5"]) == 0
    assert len((tmp_path / "trace_grid.csv").read_text().splitlines()) == 1 + 4 * 5


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dt": 0.1, "seed": 9}))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert len(trace_io.read_trace_csv(tmp_path / "trace.csv")) == 91


@pytest.mark.parametrize("argv", [
    ["simulate", "--set", "lambda_d=1.5"],
    ["simulate", "--set", "nonsense=1"],
    ["simulate", "--set", "novalue"],
    ["d2d", "--workers", "0"],
])
def test_config_errors_exit_2(argv, tmp_path, capsys):
    assert main([*argv, "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_solver_error_exit_3(tmp_path, capsys):
    code = main(["simulate", "--out", str(tmp_path), "--set", "lambda_d=1", "--set",
                 "lambda_t=1", "--set", "V_set_peak=8", "--set", "period=4"])
    assert code == 3
    assert "at step" in capsys.readouterr().err


def test_io_errors_exit_4(tmp_path):
    assert main(["analyze", str(tmp_path / "none.csv")]) == 4
    assert main(["simulate", "--config", str(tmp_path / "none.json")]) == 4
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["simulate", "--out", str(blocker / "sub")]) == 4
    short = tmp_path / "short.csv"
    short.write_text("t,V_device,I,V_SC,V_SE,V_TB,q,d_bar\n0,0,0,0,0,0,0,0\n")
    assert main(["analyze", str(short)]) == 4


def test_defaults_command(capsys):
    assert main(["defaults"]) == 0
    assert "`alpha_r`" in capsys.readouterr().out
    assert main(["defaults", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["n_ions"] == 20


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "memristor1d", "defaults", "--json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["kind"] == "sawtooth-set-reset"
