import math

import numpy as np
import pytest

from memristor1d import analysis, engine
from memristor1d.engine import TRACE_COLUMNS, SweepTrace
from memristor1d.errors import AlignmentError, InsufficientDataError
from memristor1d.params import DeviceParams, SimConfig, StochasticConfig


def _trace(v, i):
    v = np.asarray(v, dtype=float)
    cols = {name: np.zeros(v.size) for name in TRACE_COLUMNS}
    cols["t"] = np.arange(v.size) * 0.01
    cols["V_device"] = v
    cols["I"] = np.asarray(i, dtype=float)
    return SweepTrace(cols)


def _cycle(n=900, r_off=1e6, r_on=1e4, v_reset=-1.5):
    """Ideal sawtooth: high resistance up to the peak, low resistance until the reset peak."""
    t = np.arange(n + 1) / n
    wave = engine.WaveformSpec(period=1.0, V_reset_peak=v_reset)
    v = np.array([engine.waveform_value(wave, x) for x in t])
    peak = int(np.argmax(v))
    trough = int(np.argmin(v))
    r = np.where((np.arange(v.size) > peak) & (np.arange(v.size) <= trough), r_on, r_off)
    return _trace(v, v / r)


def test_parallelogram_area():
    v = [0.0, 2.0, 3.0, 1.0]
    i = [0.0, 1.0, 3.0, 2.0]
    assert analysis.shoelace_area(v, i) == 3.0
    assert analysis.shoelace_area(v[::-1], i[::-1]) == 3.0
    assert analysis.shoelace_area([0, 1], [0, 1]) == 0.0


def test_lobes_do_not_cancel():
    # pinched figure-eight: two triangles traversed in opposite senses
    v = [0, 1, 1, 0, -1, -1, 0]
    i = [0, 0, 1, 0, -1, 0, 0]
    assert analysis.shoelace_area(v, i) == 0.0
    assert analysis.loop_area(v, i) == 1.0


def test_ideal_cycle_metrics():
    m = analysis.compute_metrics(_cycle())
    assert m.R_off == pytest.approx(1e6)
    assert m.R_on == pytest.approx(1e4)
    assert m.onoff_ratio == pytest.approx(100.0)
    assert m.set_branch_I_at_peak == pytest.approx(3.0 / 1e6)
    assert m.reset_branch_I_at == pytest.approx(-1.0 / 1e4)
    assert m.loop_area > 0 and not m.degenerate
    # each lobe is a triangle: origin, the last sample on one resistive line and
    # the first sample on the other (voltage step 0.01 V on every leg)
    pos = 0.5 * 3.0 * 2.99 * (1e-4 - 1e-6)
    neg = 0.5 * 1.5 * 1.49 * (1e-4 - 1e-6)
    assert m.loop_area == pytest.approx(pos + neg, rel=1e-12)


def test_zero_current_is_degenerate():
    tr = _cycle()
    tr.columns["I"][:] = 0.0
    m = analysis.compute_metrics(tr)
    assert m.loop_area == 0.0
    assert m.degenerate and math.isnan(m.onoff_ratio)


def test_insufficient_data():
    with pytest.raises(InsufficientDataError):
        analysis.compute_metrics(_trace([0.0, 1.0, 2.0], [0.0, 1.0, 2.0]))
    with pytest.raises(InsufficientDataError):
        analysis.variability_report([_cycle()])
    with pytest.raises(InsufficientDataError):
        analysis.rsd([1.0])


def test_duplicate_traces_have_zero_spread():
    rep = analysis.variability_report([_cycle(), _cycle()])
    assert rep.rsd_set == 0.0 and rep.rsd_reset == 0.0
    assert len(rep.onoff_table()) == 2


def test_spread_tracks_reset_changes():
    a, b = _cycle(r_on=1e4), _cycle(r_on=2e4)
    rep = analysis.variability_report([a, b])
    assert rep.rsd_set == 0.0
    assert rep.rsd_reset == pytest.approx(analysis.rsd([1e-4, 0.5e-4]))


def test_alignment_error():
    # the shallow cycle never reaches the -1 V read point
    shallow = _cycle(v_reset=-0.5)
    with pytest.raises(AlignmentError):
        analysis.variability_report([_cycle(), shallow])


def test_rsd():
    assert analysis.rsd([2.0, 4.0]) == pytest.approx(np.std([2.0, 4.0], ddof=1) / 3.0)
    assert analysis.rsd([0.0, 0.0]) == 0.0


def test_reordering_invariance():
    tr = _cycle()
    rng = np.random.default_rng(0)
    perm = rng.permutation(len(tr))
    shuffled = SweepTrace({k: v[perm] for k, v in tr.columns.items()})
    assert analysis.compute_metrics(shuffled) == analysis.compute_metrics(tr)
    assert len(analysis.split_cycles(shuffled)) == 1


def test_split_cycles():
    one = _cycle()
    v = np.concatenate([one.V, one.V[1:], one.V[1:]])
    tr = _trace(v, v * 1e-6)
    parts = analysis.split_cycles(tr)
    assert len(parts) == 3
    assert [len(p) for p in parts] == [901, 901, 901]
    assert analysis.split_cycles(tr.slice(0, 500)) == []


def test_default_run_metrics():
    tr = engine.run(DeviceParams(), StochasticConfig(delta=0.0), SimConfig())
    m = analysis.compute_metrics(tr)
    assert m.loop_area > 0 and m.onoff_ratio > 1
    assert m.R_on <= m.R_off
