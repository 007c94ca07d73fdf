"""Self-consistent operating point of the Schottky / electrolyte / tunnel series circuit."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

from . import kernels
from .currents import effective_barriers
from .errors import BracketingError, ConvergenceError, SimmonsRangeWarning
from .params import CONSTANTS, DeviceParams, thermal_voltage

__all__ = ["OperatingPoint", "solve_operating_point", "I_FLOOR", "V_TOL"]

I_FLOOR = 1e-15  # A, keeps the relative KCL error defined near zero current
V_TOL = 1e-13  # V, absolute bracket width at which bisection may stop


@dataclass(frozen=True)
class OperatingPoint:
    V_device: float
    V_SC: float
    V_SE: float
    V_TB: float
    I: float
    residual: float
    iterations: int


def solve_operating_point(V_device: float, q: float, params: DeviceParams,
                          xi_tol: float = 1e-6, max_iters: int = 200) -> OperatingPoint:
    """Find ``V_TB`` such that the tunnel and Schottky currents agree.

    The electrolyte drop is folded in as ``V_SE = R_SE * I_TB(V_TB)`` and the
    Schottky drop follows from KVL, so the KCL residual
    ``g(V_TB) = I_TB - I_SC`` is strictly increasing on
    ``[min(0, V), max(0, V)]``. Bisection starts from ``V_TB = V_device`` and
    stops once the relative residual is below ``xi_tol`` and the bracket is
    narrower than :data:`V_TOL`.
    """
    V_device = float(V_device)
    eff = effective_barriers(q, params)
    c = CONSTANTS
    status, iters, v_tb, i_tb, i_sc, v_se, v_sc, res = kernels.solve_op_kernel(
        V_device, eff.d_eff, eff.phi_t_eff * c.e, eff.phi_b_eff, eff.n_eff,
        thermal_voltage(params), params.A_d, c.A_star, params.T, params.alpha_r,
        params.beta, c.e, c.m, c.h, params.R_SE, I_FLOOR, float(xi_tol), V_TOL,
        int(max_iters))
    if status == kernels.OP_NO_BRACKET:
        raise BracketingError(f"no sign change of the KCL residual for V_device={V_device!r}, "
                              f"q={q!r}")
    if status == kernels.OP_MAX_ITERS:
        raise ConvergenceError(f"operating point did not converge for V_device={V_device!r}, "
                               f"q={q!r} (best residual {res:.3g})", best_residual=res)
    if abs(v_tb) > eff.phi_t_eff:
        warnings.warn("|V_TB| exceeds the effective tunnel barrier height",
                      SimmonsRangeWarning, stacklevel=2)
    return OperatingPoint(V_device, v_sc, v_se, v_tb, i_tb, res, iters)
