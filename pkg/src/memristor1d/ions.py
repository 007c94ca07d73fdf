"""Lagrangian oxygen-ion ensemble: initialization, drift push, perturbation, state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import FieldGrid
from .params import CONSTANTS, DeviceParams, StochasticConfig

__all__ = [
    "IonEnsemble",
    "init_random",
    "drift_velocity",
    "drift_coefficients",
    "push",
    "perturb",
    "internal_state",
    "mean_distance",
]

X_SC = 0.0  # Schottky contact coordinate


@dataclass
class IonEnsemble:
    """Mobile and fixed ion sheets of the electrolyte layer.

    ``x_mobile`` is the drift backbone advanced by :func:`push`.
    ``x_observed`` is the jittered copy that defines ``d_bar`` and ``q``; it is
    redrawn around the backbone every step, so the noise does not accumulate.
    """

    x_mobile: np.ndarray
    x_fixed: np.ndarray
    sheet_charge_mobile: float
    sheet_charge_fixed: float
    d_bar_r: float
    length: float
    x_SC: float = X_SC
    x_observed: np.ndarray | None = None

    def __post_init__(self):
        if self.x_observed is None:
            self.x_observed = self.x_mobile.copy()

    @property
    def n_ions(self) -> int:
        return self.x_mobile.shape[0]

    def copy(self) -> "IonEnsemble":
        return IonEnsemble(self.x_mobile.copy(), self.x_fixed.copy(),
                           self.sheet_charge_mobile, self.sheet_charge_fixed,
                           self.d_bar_r, self.length, self.x_SC, self.x_observed.copy())

    def all_positions(self) -> np.ndarray:
        return np.concatenate((self.x_mobile, self.x_fixed))

    def all_charges(self) -> np.ndarray:
        n = self.n_ions
        out = np.empty(2 * n)
        out[:n] = self.sheet_charge_mobile
        out[n:] = self.sheet_charge_fixed
        return out


def init_random(params: DeviceParams, n_ions: int, rng: np.random.Generator) -> IonEnsemble:
    """Uniformly scattered mobile and fixed ions (the high-resistance state).

    Each of the ``n_ions`` computational particles carries ``1/n_ions`` of the
    mobile charge ``z*e*n_defect*l_SE`` per unit area; fixed ions carry the
    opposite charge.
    """
    if n_ions < 1:
        raise ValueError("n_ions must be >= 1")
    x_mobile = rng.uniform(0.0, params.l_SE, n_ions)
    x_fixed = rng.uniform(0.0, params.l_SE, n_ions)
    w = params.ion_sheet_charge / n_ions
    d_bar_r = mean_distance(x_mobile)
    return IonEnsemble(x_mobile, x_fixed, w, -w, d_bar_r, params.l_SE)


def drift_coefficients(params: DeviceParams) -> tuple[float, float, float]:
    """Return ``(2*d*p, |z|*e*d/(2*k_B*T), sign(z))`` for the hopping drift law.

    The jump rate is ``p = nu_0 * exp(-E_A / k_B T)``; the site-occupation
    factor ``N(1-n_c)f`` is taken as one.
    """
    kT = CONSTANTS.k_B * params.T
    p = params.nu_0 * math.exp(-params.E_A * CONSTANTS.e / kT)
    coeff = abs(params.z) * CONSTANTS.e * params.d / (2.0 * kT)
    return 2.0 * params.d * p, coeff, math.copysign(1.0, params.z)


def drift_velocity(E_local, params: DeviceParams):
    """Signed ion velocity (m/s) in a local field ``E_local`` (V/m).

    Magnitude ``d*p*(exp(a*E) - exp(-a*E))``; the direction follows the force
    ``z*e*E``, so anions (z < 0) move against the field.
    """
    pref, coeff, sign = drift_coefficients(params)
    scalar = np.ndim(E_local) == 0
    e = np.ascontiguousarray(np.atleast_1d(E_local), dtype=np.float64)
    out = kernels.drift(e, pref, coeff, sign, np.empty_like(e))
    return float(out[0]) if scalar else out


def push(ensemble: IonEnsemble, grid: FieldGrid, dt: float, params: DeviceParams,
         _scratch: np.ndarray | None = None) -> IonEnsemble:
    """Forward-Euler drift of the mobile ions in the solved grid field.

    Positions are clamped to ``[0, l_SE]`` (blocking electrodes). Mutates and
    returns ``ensemble``.
    """
    x = ensemble.x_mobile
    e_local = grid._gather(x, _scratch)
    pref, coeff, sign = drift_coefficients(params)
    v = kernels.drift(e_local, pref, coeff, sign, e_local)
    kernels.push(x, v, float(dt), ensemble.length)
    return ensemble


def perturb(ensemble: IonEnsemble, cfg: StochasticConfig,
            rng: np.random.Generator) -> IonEnsemble:
    """Redraw ``x_observed = x + (r - 0.5) * delta * x`` around the backbone ``x``.

    ``r ~ U[0, 1)``, one draw per mobile ion in index order, then clamping to
    ``[0, l_SE]``. Disabled perturbation copies the backbone and consumes no
    random numbers.
    """
    obs = ensemble.x_observed
    obs[:] = ensemble.x_mobile
    if not cfg.active:
        return ensemble
    r = rng.random(ensemble.n_ions)
    kernels.perturb(obs, r, float(cfg.delta), ensemble.length)
    return ensemble


def mean_distance(x_mobile: np.ndarray, x_sc: float = X_SC) -> float:
    return float(np.mean(x_mobile - x_sc))


def internal_state(ensemble: IonEnsemble) -> float:
    """q = (d_bar - d_bar_r) / d_bar_r, the relative shift of the mean ion distance."""
    d_bar = mean_distance(ensemble.x_observed, ensemble.x_SC)
    return (d_bar - ensemble.d_bar_r) / ensemble.d_bar_r
