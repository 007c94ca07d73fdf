"""Physical constants, device parameters and run configuration.

Energies that are quoted per electron (activation energy, barrier heights,
``alpha_r``) are kept in eV and converted to joules where they are used.
All other quantities are SI.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field, fields
from typing import Any, Mapping

from .errors import ConfigError

__all__ = [
    "PhysicalConstants",
    "DeviceParams",
    "StochasticConfig",
    "WaveformSpec",
    "SimConfig",
    "CONSTANTS",
    "load_config",
    "load_config_file",
    "dump_config",
    "params_hash",
    "thermal_energy",
    "thermal_voltage",
    "defaults_table",
]


@dataclass(frozen=True)
class PhysicalConstants:
    e: float = 1.602176634e-19  # C
    m: float = 9.1093837015e-31  # kg
    h: float = 6.62607015e-34  # J s
    k_B: float = 1.380649e-23  # J/K
    A_star: float = 1.20173e6  # A m^-2 K^-2
    eps_0: float = 8.8541878128e-12  # F/m

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ConfigError(f"{f.name} must be strictly positive", key=f.name)


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class DeviceParams:
    """Au/NbxOy/Al2O3/Nb double-barrier device.

    ``nu_0``, ``z``, ``alpha_r``, ``beta`` and the four ``lambda_*`` values are
    calibration knobs with no published value; the defaults here are
    conventions of this package.
    """

    T: float = 300.0  # K
    d: float = 2.5e-10  # m, jump distance
    A_d: float = 6.25e-10  # m^2 (625 um^2)
    eps_r: float = 42.0
    E_A: float = 0.76  # eV
    sigma: float = 1.0e-4  # S/m
    l_SE: float = 2.5e-9  # m
    n_defect: float = 5.0e26  # m^-3 (5e20 cm^-3)
    d_0: float = 1.1e-9  # m
    phi_t: float = 3.2  # eV
    phi_b0: float = 0.98  # eV
    n_0: float = 4.2
    z: int = -2
    # calibrated so the default sweeps show set, reset and amplitude saturation
    nu_0: float = 1.93e12  # Hz
    alpha_r: float = 0.65  # eV V^-1/2
    beta: float = 0.935
    lambda_d: float = 0.262
    lambda_t: float = 0.63
    lambda_b: float = 0.818
    lambda_n: float = 0.0536

    def __post_init__(self):
        positive = ("T", "d", "A_d", "l_SE", "d_0", "nu_0", "sigma", "n_defect",
                    "phi_t", "phi_b0", "beta", "E_A")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be > 0, got {value!r}", key=name)
        if not self.eps_r >= 1:
            raise ConfigError(f"eps_r must be >= 1, got {self.eps_r!r}", key="eps_r")
        if not self.n_0 >= 1:
            raise ConfigError(f"n_0 must be >= 1, got {self.n_0!r}", key="n_0")
        if not self.alpha_r >= 0:
            raise ConfigError(f"alpha_r must be >= 0, got {self.alpha_r!r}", key="alpha_r")
        if int(self.z) != self.z or self.z == 0:
            raise ConfigError(f"z must be a non-zero integer, got {self.z!r}", key="z")
        object.__setattr__(self, "z", int(self.z))
        # lambda_n may be negative to flip the direction of the ideality change
        for name in ("lambda_d", "lambda_t", "lambda_b"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ConfigError(f"{name} must lie in [0, 1], got {value!r}", key=name)
        if not -1 <= self.lambda_n <= 1:
            raise ConfigError(f"lambda_n must lie in [-1, 1], got {self.lambda_n!r}",
                              key="lambda_n")

    @property
    def eps(self) -> float:
        """Absolute permittivity of the electrolyte (F/m)."""
        return self.eps_r * CONSTANTS.eps_0

    @property
    def ion_sheet_charge(self) -> float:
        """Total mobile-ion sheet charge (C/m^2); negative for anions."""
        return self.z * CONSTANTS.e * self.n_defect * self.l_SE

    @property
    def R_SE(self) -> float:
        """Ohmic resistance of the electrolyte layer (ohm)."""
        return self.l_SE / (self.sigma * self.A_d)


@dataclass(frozen=True)
class StochasticConfig:
    delta: float = 0.05
    seed: int = 0
    perturbation_enabled: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise ConfigError(f"delta must be >= 0, got {self.delta!r}", key="delta")
        if self.delta > 0.05:
            warnings.warn(f"delta={self.delta} exceeds the 1%-5% stable range",
                          RuntimeWarning, stacklevel=3)
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}",
                              key="seed")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def active(self) -> bool:
        return self.perturbation_enabled and self.delta > 0


WAVEFORM_KINDS = ("sawtooth-set-reset", "sinusoid")


@dataclass(frozen=True)
class WaveformSpec:
    kind: str = "sawtooth-set-reset"
    V_set_peak: float = 3.0
    V_reset_peak: float = -1.5
    amplitude: float = 3.0
    period: float = 9.0
    cycles: int = 1

    def __post_init__(self):
        if self.kind not in WAVEFORM_KINDS:
            raise ConfigError(f"unknown waveform kind {self.kind!r}; "
                              f"expected one of {WAVEFORM_KINDS}", key="kind")
        if not self.period > 0:
            raise ConfigError("period must be > 0", key="period")
        if int(self.cycles) != self.cycles or self.cycles < 1:
            raise ConfigError("cycles must be an integer >= 1", key="cycles")
        object.__setattr__(self, "cycles", int(self.cycles))
        if self.kind == "sawtooth-set-reset" and not self.V_set_peak > 0 > self.V_reset_peak:
            raise ConfigError("sawtooth needs V_set_peak > 0 > V_reset_peak",
                              key="V_set_peak")


@dataclass(frozen=True)
class SimConfig:
    n_ions: int = 20
    n_grid: int = 101
    dt: float = 0.01  # s
    t_max: float | None = None  # s; None -> waveform.cycles * waveform.period
    xi_tol: float = 1e-6
    max_inner_iters: int = 200
    waveform: WaveformSpec = field(default_factory=WaveformSpec)

    def __post_init__(self):
        if int(self.n_ions) != self.n_ions or self.n_ions < 1:
            raise ConfigError("n_ions must be an integer >= 1", key="n_ions")
        if int(self.n_grid) != self.n_grid or self.n_grid < 3:
            raise ConfigError("n_grid must be an integer >= 3", key="n_grid")
        if not self.dt > 0:
            raise ConfigError("dt must be > 0", key="dt")
        if self.t_max is not None and not self.t_max >= self.dt:
            raise ConfigError("t_max must be >= dt", key="t_max")
        if not 0 < self.xi_tol < 1:
            raise ConfigError("xi_tol must lie in (0, 1)", key="xi_tol")
        if int(self.max_inner_iters) != self.max_inner_iters or self.max_inner_iters < 1:
            raise ConfigError("max_inner_iters must be an integer >= 1",
                              key="max_inner_iters")

    @property
    def total_time(self) -> float:
        if self.t_max is not None:
            return self.t_max
        return self.waveform.cycles * self.waveform.period

    @property
    def n_steps(self) -> int:
        """Number of trace rows, ``floor(t_max/dt) + 1``."""
        # the small slack absorbs binary representation error of t_max/dt
        return int(math.floor(self.total_time / self.dt * (1 + 1e-12))) + 1


_SECTIONS = {
    "device": DeviceParams,
    "stochastic": StochasticConfig,
    "sim": SimConfig,
    "waveform": WaveformSpec,
}


def _owner_of(key: str) -> str | None:
    for section, cls in _SECTIONS.items():
        if key in {f.name for f in fields(cls)} and not (section == "sim" and key == "waveform"):
            return section
    return None


def load_config(document: str | bytes | Mapping[str, Any]
                ) -> tuple[DeviceParams, StochasticConfig, SimConfig]:
    """Parse a flat key/value (JSON object) document into validated parameter sets.

    Missing keys take their defaults. Unknown keys and invariant violations raise
    :class:`ConfigError` naming the offending key.
    """
    if isinstance(document, (str, bytes)):
        text = document.decode("utf-8") if isinstance(document, bytes) else document
        if not text.strip():
            doc: Mapping[str, Any] = {}
        else:
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"cannot parse config: {exc.msg} "
                                  f"(line {exc.lineno}, column {exc.colno})") from exc
    else:
        doc = document
    if not isinstance(doc, Mapping):
        raise ConfigError("config document must be a key/value object")

    buckets: dict[str, dict[str, Any]] = {name: {} for name in _SECTIONS}
    for key, value in doc.items():
        owner = _owner_of(key)
        if owner is None:
            raise ConfigError(f"unknown config key {key!r}", key=key)
        if isinstance(value, (dict, list)):
            raise ConfigError(f"config value for {key!r} must be a scalar", key=key)
        buckets[owner][key] = value

    try:
        device = DeviceParams(**buckets["device"])
        stochastic = StochasticConfig(**buckets["stochastic"])
        waveform = WaveformSpec(**buckets["waveform"])
        sim = SimConfig(waveform=waveform, **buckets["sim"])
    except TypeError as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc
    return device, stochastic, sim


def load_config_file(path) -> tuple[DeviceParams, StochasticConfig, SimConfig]:
    with open(path, "rb") as fh:
        return load_config(fh.read())


def config_dict(device: DeviceParams, stochastic: StochasticConfig,
                sim: SimConfig) -> dict[str, Any]:
    out: dict[str, Any] = {}
    out.update(dataclasses.asdict(device))
    out.update(dataclasses.asdict(stochastic))
    sim_fields = dataclasses.asdict(sim)
    out.update(sim_fields.pop("waveform"))
    out.update(sim_fields)
    return out


def dump_config(device: DeviceParams, stochastic: StochasticConfig,
                sim: SimConfig) -> str:
    """Serialize to a flat JSON document that :func:`load_config` reads back exactly."""
    # json writes floats with repr(), which round-trips bit-exactly
    return json.dumps(config_dict(device, stochastic, sim), indent=2, sort_keys=True)


def params_hash(device: DeviceParams, stochastic: StochasticConfig, sim: SimConfig) -> str:
    blob = json.dumps(config_dict(device, stochastic, sim), sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def thermal_energy(params: DeviceParams) -> float:
    """k_B*T in joules."""
    return CONSTANTS.k_B * params.T


def thermal_voltage(params: DeviceParams) -> float:
    """k_B*T/e in volts (equivalently k_B*T in eV)."""
    return CONSTANTS.k_B * params.T / CONSTANTS.e


_UNITS = {
    "T": "K", "d": "m", "A_d": "m^2", "eps_r": "-", "E_A": "eV", "sigma": "S/m",
    "l_SE": "m", "n_defect": "m^-3", "d_0": "m", "phi_t": "eV", "phi_b0": "eV",
    "n_0": "-", "z": "-", "nu_0": "Hz", "alpha_r": "eV V^-1/2", "beta": "-",
    "lambda_d": "-", "lambda_t": "-", "lambda_b": "-", "lambda_n": "-",
    "delta": "-", "seed": "-", "perturbation_enabled": "-",
    "kind": "-", "V_set_peak": "V", "V_reset_peak": "V", "amplitude": "V",
    "period": "s", "cycles": "-", "n_ions": "-", "n_grid": "-", "dt": "s",
    "t_max": "s", "xi_tol": "-", "max_inner_iters": "-",
}

_CALIBRATION = {"nu_0", "z", "alpha_r", "beta", "lambda_d", "lambda_t", "lambda_b",
                "lambda_n"}


def defaults_table() -> str:
    """Markdown table of every config key with its default and unit."""
    rows = ["| key | default | unit | note |", "|---|---|---|---|"]
    for key, value in config_dict(DeviceParams(), StochasticConfig(), SimConfig()).items():
        if value is None:
            shown = "cycles*period"
        else:
            shown = repr(value)
        note = "calibration knob" if key in _CALIBRATION else ""
        rows.append(f"| `{key}` | {shown} | {_UNITS.get(key, '-')} | {note} |")
    return "\n".join(rows) + "\n"
