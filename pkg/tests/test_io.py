import json

import numpy as np
import pytest

from memristor1d import engine
from memristor1d import io as trace_io
from memristor1d.engine import TRACE_COLUMNS, SweepTrace
from memristor1d.errors import TraceIOError
from memristor1d.params import DeviceParams, SimConfig, StochasticConfig


def _synthetic(rows=3, n_ions=2):
    rng = np.random.default_rng(0)
    cols = {name: rng.normal(size=rows) * 10.0 ** rng.integers(-20, 3) for name in TRACE_COLUMNS}
    cols["t"] = np.arange(rows) * 0.01
    cols["I"][0] = 5e-324  # subnormal survives too
    ions = rng.uniform(0, 2.5e-9, (rows, n_ions))
    return SweepTrace(cols, ions, {"seed": 0})


def test_three_rows_four_lines(tmp_path):
    path = tmp_path / "t.csv"
    trace_io.write_trace_csv(_synthetic(), path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 4
    assert lines[0] == "t,V_device,I,V_SC,V_SE,V_TB,q,d_bar"


def test_csv_round_trip_bit_exact(tmp_path):
    tr = _synthetic(rows=50, n_ions=5)
    path = tmp_path / "t.csv"
    written = trace_io.write_trace_csv(tr, path, ion_trace=True)
    trace_io.write_metadata(tr, path)
    assert written == [path, tmp_path / "t_ions.csv"]
    back = trace_io.read_trace_csv(path)
    for name in TRACE_COLUMNS:
        assert back[name].tobytes() == tr[name].tobytes()
    assert back.ions.tobytes() == tr.ions.tobytes()
    assert back.metadata == {"seed": 0}


def test_ion_file_header(tmp_path):
    tr = _synthetic(n_ions=3)
    trace_io.write_trace_csv(tr, tmp_path / "r.csv", ion_trace=True)
    header = (tmp_path / "r_ions.csv").read_text().splitlines()[0]
    assert header == "t,x_0,x_1,x_2,d_bar,q"
    with pytest.raises(ValueError):
        trace_io.write_trace_csv(SweepTrace(tr.columns), tmp_path / "x.csv", ion_trace=True)


def test_json_round_trip(tmp_path):
    tr = _synthetic(rows=20)
    path = trace_io.write_trace_json(tr, tmp_path / "t.json")
    doc = json.loads(path.read_text())
    assert doc["columns"] == list(TRACE_COLUMNS)
    back = trace_io.read_trace_json(path)
    assert back.table().tobytes() == tr.table().tobytes()
    assert back.ions.tobytes() == tr.ions.tobytes()


def test_default_run_has_901_rows(tmp_path):
    tr = engine.run(DeviceParams(), StochasticConfig(delta=0.0), SimConfig())
    path = tmp_path / "run.csv"
    trace_io.write_trace_csv(tr, path)
    assert len(path.read_text().splitlines()) == 902
    meta = json.loads(trace_io.write_metadata(tr, path).read_text())
    assert meta["seed"] == 0 and len(meta["params_hash"]) == 16


def test_write_error_carries_path(tmp_path):
    bad = tmp_path / "missing" / "t.csv"
    with pytest.raises(TraceIOError) as info:
        trace_io.write_trace_csv(_synthetic(), bad)
    assert info.value.path == str(bad)
    assert isinstance(info.value, OSError)


def test_read_errors(tmp_path):
    with pytest.raises(TraceIOError):
        trace_io.read_trace_csv(tmp_path / "nope.csv")
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b\n1,2\n")
    with pytest.raises(TraceIOError, match="header"):
        trace_io.read_trace_csv(wrong)
    junk = tmp_path / "junk.json"
    junk.write_text("{")
    with pytest.raises(TraceIOError):
        trace_io.read_trace_json(junk)


def test_grid_dump(tmp_path):
    sim = SimConfig(t_max=0.02, n_grid=11)
    path = tmp_path / "g.csv"
    with trace_io.GridDumpWriter(path) as dump:
        engine.run(DeviceParams(), StochasticConfig(), sim, on_grid=dump)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,t,x,rho,phi,E"
    assert len(lines) == 1 + 3 * 11
    with pytest.raises(RuntimeError):
        trace_io.GridDumpWriter(path)(0, 0.0, None)
