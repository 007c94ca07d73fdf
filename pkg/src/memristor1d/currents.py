"""Current laws of the three series elements: tunnel barrier, electrolyte, Schottky contact."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateStateError, SimmonsRangeWarning
from .params import CONSTANTS, DeviceParams, thermal_voltage

__all__ = [
    "EffectiveBarriers",
    "effective_barriers",
    "simmons_exponent",
    "tunnel_current",
    "schottky_current",
    "ohmic_drop",
]


@dataclass(frozen=True)
class EffectiveBarriers:
    d_eff: float  # m
    phi_t_eff: float  # eV
    phi_b_eff: float  # eV
    n_eff: float


def simmons_exponent(d_eff: float, phi_t_eff: float, beta: float) -> float:
    """``A*sqrt(phi)`` of the tunnel exponent, ``4*pi*beta*d*sqrt(2*m*phi)/h``."""
    c = CONSTANTS
    return 4.0 * math.pi * beta * d_eff * math.sqrt(2.0 * c.m * phi_t_eff * c.e) / c.h


def effective_barriers(q: float, params: DeviceParams) -> EffectiveBarriers:
    """Scale the four barrier parameters linearly with the internal state ``q``.

    Raises :class:`DegenerateStateError` when a parameter is no longer positive,
    or when the barrier is so thin (``A*sqrt(phi) <= 2``) that the Simmons
    current stops growing with bias and the operating point is not unique.
    """
    eff = EffectiveBarriers(
        d_eff=params.d_0 * (1.0 + params.lambda_d * q),
        phi_t_eff=params.phi_t * (1.0 + params.lambda_t * q),
        phi_b_eff=params.phi_b0 * (1.0 + params.lambda_b * q),
        n_eff=params.n_0 * (1.0 + params.lambda_n * q),
    )
    for name in ("d_eff", "phi_t_eff", "phi_b_eff", "n_eff"):
        value = getattr(eff, name)
        if not value > 0:
            raise DegenerateStateError(f"{name}={value!r} is not positive at q={q!r}")
    if simmons_exponent(eff.d_eff, eff.phi_t_eff, params.beta) <= 2.0:
        raise DegenerateStateError(f"tunnel barrier too thin for the Simmons form at q={q!r} "
                                   f"(d_eff={eff.d_eff:.3g} m, phi_t_eff={eff.phi_t_eff:.3g} eV)")
    return eff


def _vectorize(fn, v):
    if np.ndim(v) == 0:
        return fn(float(v))
    return np.array([fn(float(x)) for x in np.ravel(v)]).reshape(np.shape(v))


def tunnel_current(V_TB, q: float, params: DeviceParams):
    """Simmons tunnel current (A), odd in ``V_TB``."""
    eff = effective_barriers(q, params)
    c = CONSTANTS
    phi_j = eff.phi_t_eff * c.e
    if np.any(np.abs(V_TB) > eff.phi_t_eff):
        warnings.warn("|V_TB| exceeds the effective tunnel barrier height",
                      SimmonsRangeWarning, stacklevel=2)

    def one(v):
        return kernels.simmons_kernel(v, eff.d_eff, phi_j, params.A_d, params.beta,
                                      c.e, c.m, c.h)

    return _vectorize(one, V_TB)


def schottky_current(V_SC, q: float, params: DeviceParams):
    """Thermionic-emission diode current (A) with bias-dependent reverse saturation."""
    eff = effective_barriers(q, params)
    vth = thermal_voltage(params)

    def one(v):
        return kernels.schottky_kernel(v, eff.phi_b_eff, eff.n_eff, vth, params.A_d,
                                       CONSTANTS.A_star, params.T, params.alpha_r)

    return _vectorize(one, V_SC)


def ohmic_drop(I, params: DeviceParams):
    """Voltage across the electrolyte, ``I * l_SE / (sigma * A_d)``."""
    return I * params.R_SE
