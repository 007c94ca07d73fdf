"""Time stepping: waveform, operating point, field solve, ion update, trace recording."""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._backend import backend_name
from .circuit import OperatingPoint, solve_operating_point
from .errors import SimulationError
from .field import FieldGrid
from .ions import IonEnsemble, init_random, internal_state, mean_distance, perturb, push
from .params import (DeviceParams, SimConfig, StochasticConfig, WaveformSpec,
                     params_hash)

__all__ = [
    "TRACE_COLUMNS",
    "SweepTrace",
    "SimState",
    "waveform_value",
    "init_state",
    "step",
    "run",
    "run_c2c",
    "run_d2d",
    "run_amplitude_study",
]

TRACE_COLUMNS = ("t", "V_device", "I", "V_SC", "V_SE", "V_TB", "q", "d_bar")


@dataclass
class SweepTrace:
    """Per-step record of one run. ``ions`` has shape ``(rows, n_ions)`` when kept."""

    columns: dict[str, np.ndarray]
    ions: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.columns["t"])

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]

    @property
    def V(self) -> np.ndarray:
        return self.columns["V_device"]

    @property
    def I(self) -> np.ndarray:  # noqa: E743
        return self.columns["I"]

    def table(self) -> np.ndarray:
        return np.column_stack([self.columns[c] for c in TRACE_COLUMNS])

    def slice(self, start: int, stop: int) -> "SweepTrace":
        cols = {k: v[start:stop].copy() for k, v in self.columns.items()}
        ions = None if self.ions is None else self.ions[start:stop].copy()
        return SweepTrace(cols, ions, dict(self.metadata))


def waveform_value(spec: WaveformSpec, t: float) -> float:
    """Applied device voltage at time ``t``.

    The set/reset sawtooth runs 0 -> V_set_peak -> 0 -> V_reset_peak -> 0 each
    period, with leg durations proportional to the voltage span of each leg.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    u = t / spec.period
    phase = u - math.floor(u)
    if spec.kind == "sinusoid":
        return spec.amplitude * math.sin(2.0 * math.pi * phase)
    if spec.kind != "sawtooth-set-reset":
        raise ValueError(f"unknown waveform kind {spec.kind!r}")
    vs, vr = spec.V_set_peak, spec.V_reset_peak
    total = 2.0 * vs - 2.0 * vr
    b1 = vs / total
    b2 = 2.0 * vs / total
    b3 = (2.0 * vs - vr) / total
    if phase <= b1:
        return vs * phase / b1
    if phase <= b2:
        return vs * (b2 - phase) / (b2 - b1)
    if phase <= b3:
        return vr * (phase - b2) / (b3 - b2)
    return vr * (1.0 - phase) / (1.0 - b3)


@dataclass
class SimState:
    device: DeviceParams
    stochastic: StochasticConfig
    sim: SimConfig
    ensemble: IonEnsemble
    grid: FieldGrid
    rng: np.random.Generator
    q: float = 0.0
    _positions: np.ndarray = field(default=None, repr=False)
    _charges: np.ndarray = field(default=None, repr=False)
    _scratch: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        n = self.ensemble.n_ions
        self._positions = np.empty(2 * n)
        self._positions[n:] = self.ensemble.x_fixed
        self._charges = self.ensemble.all_charges()
        self._scratch = np.empty(n)


def init_state(device: DeviceParams, stochastic: StochasticConfig,
               sim: SimConfig) -> SimState:
    rng = np.random.default_rng(stochastic.seed)
    ensemble = init_random(device, sim.n_ions, rng)
    grid = FieldGrid.for_device(device, sim.n_grid)
    return SimState(device, stochastic, sim, ensemble, grid, rng, 0.0)


def step(state: SimState, t: float, dt: float) -> OperatingPoint:
    """Advance one outer step and return the operating point at time ``t``.

    The operating point is solved with the state *before* the ion update; the
    resulting interface potentials then drive the field solve and the push.
    """
    device = state.device
    v = waveform_value(state.sim.waveform, t)
    op = solve_operating_point(v, state.q, device, state.sim.xi_tol,
                               state.sim.max_inner_iters)
    ens = state.ensemble
    n = ens.n_ions
    state._positions[:n] = ens.x_mobile
    grid = state.grid
    grid._deposit(state._positions, state._charges)
    grid._solve(v - op.V_SC, op.V_TB)
    push(ens, grid, dt, device, state._scratch)
    perturb(ens, state.stochastic, state.rng)
    state.q = internal_state(ens)
    return op


def _empty_columns(rows: int) -> dict[str, np.ndarray]:
    return {name: np.empty(rows) for name in TRACE_COLUMNS}


def run(device: DeviceParams, stochastic: StochasticConfig, sim: SimConfig,
        keep_ions: bool = False,
        on_grid: Callable[[int, float, FieldGrid], None] | None = None) -> SweepTrace:
    """Integrate from ``t = 0`` to ``t_max`` and return one row per outer step.

    ``on_grid(k, t, grid)`` is called after each field solve (debug dumps).
    """
    state = init_state(device, stochastic, sim)
    rows = sim.n_steps
    dt = sim.dt
    cols = _empty_columns(rows)
    ions = np.empty((rows, sim.n_ions)) if keep_ions else None
    ens = state.ensemble
    for k in range(rows):
        t = k * dt
        cols["q"][k] = state.q
        cols["d_bar"][k] = mean_distance(ens.x_observed, ens.x_SC)
        if ions is not None:
            ions[k] = ens.x_observed
        try:
            op = step(state, t, dt)
        except SimulationError as exc:
            exc.step = k
            raise
        if on_grid is not None:
            on_grid(k, t, state.grid)
        cols["t"][k] = t
        cols["V_device"][k] = op.V_device
        cols["I"][k] = op.I
        cols["V_SC"][k] = op.V_SC
        cols["V_SE"][k] = op.V_SE
        cols["V_TB"][k] = op.V_TB
    meta = {
        "seed": stochastic.seed,
        "delta": stochastic.delta if stochastic.active else 0.0,
        "params_hash": params_hash(device, stochastic, sim),
        "backend": backend_name(),
        "dt": dt,
        "n_ions": sim.n_ions,
        "n_grid": sim.n_grid,
        "d_bar_r": ens.d_bar_r,
        "waveform": dataclasses.asdict(sim.waveform),
    }
    return SweepTrace(cols, ions, meta)


def _with_waveform(sim: SimConfig, **changes) -> SimConfig:
    return dataclasses.replace(sim, waveform=dataclasses.replace(sim.waveform, **changes),
                               t_max=None)


def _run_job(job):
    device, stochastic, sim, keep_ions = job
    return run(device, stochastic, sim, keep_ions=keep_ions)


def _run_many(jobs, workers: int) -> list[SweepTrace]:
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs))


def run_c2c(device: DeviceParams, stochastic: StochasticConfig, sim: SimConfig,
            cycles: int = 4, seed: int | None = None, keep_ions: bool = False,
            on_grid: Callable[[int, float, FieldGrid], None] | None = None) -> SweepTrace:
    """One device, one initialization, ``cycles`` contiguous waveform periods."""
    if seed is not None:
        stochastic = dataclasses.replace(stochastic, seed=seed)
    return run(device, stochastic, _with_waveform(sim, cycles=cycles), keep_ions=keep_ions,
               on_grid=on_grid)


def run_d2d(device: DeviceParams, stochastic: StochasticConfig, sim: SimConfig,
            n_devices: int = 4, seeds: Sequence[int] | None = None,
            workers: int = 1, keep_ions: bool = False) -> list[SweepTrace]:
    """Independent devices (distinct initial ion arrangements), one cycle each."""
    if seeds is None:
        seeds = [stochastic.seed + i for i in range(n_devices)]
    if len(set(seeds)) != len(seeds):
        raise ValueError("device seeds must be distinct")
    sim1 = _with_waveform(sim, cycles=1)
    jobs = [(device, dataclasses.replace(stochastic, seed=int(s)), sim1, keep_ions)
            for s in seeds]
    return _run_many(jobs, workers)


def run_amplitude_study(device: DeviceParams, stochastic: StochasticConfig,
                        sim: SimConfig, amplitudes: Sequence[float] = (2.0, 2.5, 3.0, 5.0),
                        workers: int = 1, keep_ions: bool = False) -> list[SweepTrace]:
    """Sinusoidal drive at each amplitude; every run shares the same seed."""
    jobs = [(device, stochastic, _with_waveform(sim, kind="sinusoid", amplitude=float(a)),
             keep_ions)
            for a in amplitudes]
    return _run_many(jobs, workers)
