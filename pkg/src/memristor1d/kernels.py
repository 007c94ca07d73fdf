"""Hot numeric kernels.

Every array kernel exists twice: a loop version compiled with numba and a
vectorized numpy version. :data:`IMPLS` holds both; the module-level names
point at whichever :mod:`memristor1d._backend` selected. The scalar kernels
(element currents and the operating-point bisection) are written once in
``math``-only Python, which numba compiles unchanged.
"""
import math

import numpy as np

from ._backend import USE_NUMBA, njit

SINH_CLAMP = 50.0

# status codes returned by solve_op_kernel
OP_OK = 0
OP_NO_BRACKET = 1
OP_MAX_ITERS = 2


# --------------------------------------------------------------------------
# CIC deposit
# --------------------------------------------------------------------------

def _deposit_loop(x, sheet, n_nodes, dx, rho):
    for j in range(n_nodes):
        rho[j] = 0.0
    for i in range(x.shape[0]):
        s = x[i] / dx
        j = int(math.floor(s))
        if j > n_nodes - 2:
            j = n_nodes - 2
        f = s - j
        rho[j] += (1.0 - f) * sheet[i]
        rho[j + 1] += f * sheet[i]
    for j in range(1, n_nodes - 1):
        rho[j] /= dx
    rho[0] /= 0.5 * dx
    rho[n_nodes - 1] /= 0.5 * dx
    return rho


def _deposit_numpy(x, sheet, n_nodes, dx, rho):
    s = x / dx
    j = np.minimum(np.floor(s).astype(np.int64), n_nodes - 2)
    f = s - j
    acc = np.bincount(j, weights=(1.0 - f) * sheet, minlength=n_nodes)
    acc += np.bincount(j + 1, weights=f * sheet, minlength=n_nodes)
    vol = np.full(n_nodes, dx)
    vol[0] = vol[-1] = 0.5 * dx
    rho[:] = acc / vol
    return rho


# --------------------------------------------------------------------------
# Poisson: (phi[j+1] - 2 phi[j] + phi[j-1]) / dx^2 = -rho[j] / eps, Dirichlet ends
# --------------------------------------------------------------------------

def _poisson_thomas(rho, eps, dx, phi_left, phi_right, phi):
    n = rho.shape[0]
    m = n - 2
    phi[0] = phi_left
    phi[n - 1] = phi_right
    if m == 0:
        return phi
    # unknowns phi[1..n-2]; sub/super diagonal 1, diagonal -2
    cp = np.empty(m)
    dp = np.empty(m)
    scale = dx * dx / eps
    rhs = -rho[1] * scale - phi_left
    if m == 1:
        rhs -= phi_right
    cp[0] = 1.0 / -2.0
    dp[0] = rhs / -2.0
    for k in range(1, m):
        rhs = -rho[k + 1] * scale
        if k == m - 1:
            rhs -= phi_right
        denom = -2.0 - cp[k - 1]
        cp[k] = 1.0 / denom
        dp[k] = (rhs - dp[k - 1]) / denom
    phi[m] = dp[m - 1]
    for k in range(m - 2, -1, -1):
        phi[k + 1] = dp[k] - cp[k] * phi[k + 2]
    return phi


def _poisson_cumsum(rho, eps, dx, phi_left, phi_right, phi):
    # Integrate the second difference twice; the first slope is fixed by the
    # right boundary value.
    n = rho.shape[0]
    b = -rho[1:-1] * (dx * dx / eps)
    c = np.concatenate(([0.0], np.cumsum(b)))  # slope increments, length n-1
    s0 = (phi_right - phi_left - c.sum()) / (n - 1)
    slopes = s0 + c
    phi[0] = phi_left
    phi[1:] = phi_left + np.cumsum(slopes)
    phi[-1] = phi_right
    return phi


# --------------------------------------------------------------------------
# Field on nodes and gather to particles
# --------------------------------------------------------------------------

def _node_field_loop(phi, dx, out):
    n = phi.shape[0]
    for j in range(1, n - 1):
        out[j] = -(phi[j + 1] - phi[j - 1]) / (2.0 * dx)
    if n >= 3:
        out[0] = -(-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dx)
        out[n - 1] = -(3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * dx)
    return out


def _node_field_numpy(phi, dx, out):
    out[1:-1] = -(phi[2:] - phi[:-2]) / (2.0 * dx)
    out[0] = -(-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dx)
    out[-1] = -(3.0 * phi[-1] - 4.0 * phi[-2] + phi[-3]) / (2.0 * dx)
    return out


def _gather_loop(e_node, x, dx, out):
    n = e_node.shape[0]
    for i in range(x.shape[0]):
        s = x[i] / dx
        j = int(math.floor(s))
        if j > n - 2:
            j = n - 2
        f = s - j
        out[i] = (1.0 - f) * e_node[j] + f * e_node[j + 1]
    return out


def _gather_numpy(e_node, x, dx, out):
    n = e_node.shape[0]
    s = x / dx
    j = np.minimum(np.floor(s).astype(np.int64), n - 2)
    f = s - j
    out[:] = (1.0 - f) * e_node[j] + f * e_node[j + 1]
    return out


# --------------------------------------------------------------------------
# Ion drift
# --------------------------------------------------------------------------

def _drift_loop(e_local, prefactor, field_coeff, sign, out):
    for i in range(e_local.shape[0]):
        arg = field_coeff * e_local[i]
        if arg > SINH_CLAMP:
            arg = SINH_CLAMP
        elif arg < -SINH_CLAMP:
            arg = -SINH_CLAMP
        out[i] = sign * prefactor * math.sinh(arg)
    return out


def _drift_numpy(e_local, prefactor, field_coeff, sign, out):
    arg = np.clip(field_coeff * e_local, -SINH_CLAMP, SINH_CLAMP)
    out[:] = sign * prefactor * np.sinh(arg)
    return out


def _push_loop(x, v, dt, length):
    for i in range(x.shape[0]):
        xi = x[i] + v[i] * dt
        if xi < 0.0:
            xi = 0.0
        elif xi > length:
            xi = length
        x[i] = xi
    return x


def _push_numpy(x, v, dt, length):
    np.clip(x + v * dt, 0.0, length, out=x)
    return x


def _perturb_loop(x, r, delta, length):
    for i in range(x.shape[0]):
        xi = x[i] + (r[i] - 0.5) * delta * x[i]
        if xi < 0.0:
            xi = 0.0
        elif xi > length:
            xi = length
        x[i] = xi
    return x


def _perturb_numpy(x, r, delta, length):
    np.clip(x + (r - 0.5) * delta * x, 0.0, length, out=x)
    return x


_ARRAY_KERNELS = {
    "deposit": (_deposit_loop, _deposit_numpy),
    "poisson": (_poisson_thomas, _poisson_cumsum),
    "node_field": (_node_field_loop, _node_field_numpy),
    "gather": (_gather_loop, _gather_numpy),
    "drift": (_drift_loop, _drift_numpy),
    "push": (_push_loop, _push_numpy),
    "perturb": (_perturb_loop, _perturb_numpy),
}

IMPLS = {
    "numba": {name: njit(loop) for name, (loop, _) in _ARRAY_KERNELS.items()},
    "numpy": {name: vec for name, (_, vec) in _ARRAY_KERNELS.items()},
}

_active = IMPLS["numba" if USE_NUMBA else "numpy"]
deposit = _active["deposit"]
poisson = _active["poisson"]
node_field = _active["node_field"]
gather = _active["gather"]
drift = _active["drift"]
push = _active["push"]
perturb = _active["perturb"]


# --------------------------------------------------------------------------
# Scalar element currents and the operating-point root solve
# --------------------------------------------------------------------------

def _build_scalar_kernels(jit):
    """Build the element-current and bisection kernels, each wrapped by ``jit``."""

    @jit
    def simmons(v_tb, d_eff, phi_j, area, beta, e, m, h):
        # phi_j: effective tunnel barrier height in joules
        a = 4.0 * math.pi * beta * d_eff * math.sqrt(2.0 * m) / h
        pref = e * area / (2.0 * math.pi * h * (beta * d_eff) ** 2)
        # phi*exp(-a*sqrt(phi)) - (phi+eV)*exp(-a*sqrt(phi+eV)), rearranged so the
        # difference stays accurate when eV << phi
        de = e * abs(v_tb)
        root = math.sqrt(phi_j)
        dsqrt = de / (math.sqrt(phi_j + de) + root)
        mag = -pref * phi_j * math.exp(-a * root) * math.expm1(math.log1p(de / phi_j)
                                                               - a * dsqrt)
        if v_tb < 0.0:
            return -mag
        return mag

    @jit
    def schottky(v_sc, phib_ev, n_eff, vth, area, a_star, temp, alpha_r):
        # vth = k_B T / e; energies in eV
        i_r = area * a_star * temp * temp * math.exp(-phib_ev / vth)
        if v_sc < 0.0:
            lowering = alpha_r * math.sqrt(-v_sc) / vth
            if lowering > 700.0:
                lowering = 700.0
            i_r *= math.exp(lowering)
        arg = v_sc / (n_eff * vth)
        if arg > 700.0:
            arg = 700.0
        return i_r * math.expm1(arg)

    @jit
    def residual(v_tb, v_dev, d_eff, phit_j, phib_ev, n_eff, vth, area, a_star, temp,
                 alpha_r, beta, e, m, h, r_se, i_floor):
        i_tb = simmons(v_tb, d_eff, phit_j, area, beta, e, m, h)
        v_se = i_tb * r_se
        v_sc = v_dev - v_tb - v_se
        i_sc = schottky(v_sc, phib_ev, n_eff, vth, area, a_star, temp, alpha_r)
        g = i_tb - i_sc
        scale = max(abs(i_tb), abs(i_sc), i_floor)
        return g, abs(g) / scale, i_tb, i_sc, v_se, v_sc

    @jit
    def solve_op(v_dev, d_eff, phit_j, phib_ev, n_eff, vth, area, a_star, temp, alpha_r,
                 beta, e, m, h, r_se, i_floor, xi_tol, v_tol, max_iters):
        """Bisection on V_TB; returns (status, iters, v_tb, i_tb, i_sc, v_se, v_sc, res)."""
        if v_dev == 0.0:
            return OP_OK, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0

        # the tunnel drop starts at the full device voltage
        hi = v_dev
        lo = 0.0
        if lo > hi:
            lo, hi = hi, lo
        g_hi, r_hi, it_hi, is_hi, vse_hi, vsc_hi = residual(
            hi, v_dev, d_eff, phit_j, phib_ev, n_eff, vth, area, a_star, temp, alpha_r,
            beta, e, m, h, r_se, i_floor)
        g_lo, r_lo, it_lo, is_lo, vse_lo, vsc_lo = residual(
            lo, v_dev, d_eff, phit_j, phib_ev, n_eff, vth, area, a_star, temp, alpha_r,
            beta, e, m, h, r_se, i_floor)
        if g_hi == 0.0:
            return OP_OK, 0, hi, it_hi, is_hi, vse_hi, vsc_hi, r_hi
        if g_lo == 0.0:
            return OP_OK, 0, lo, it_lo, is_lo, vse_lo, vsc_lo, r_lo

        span = abs(v_dev)
        attempts = 0
        while (g_lo > 0.0) == (g_hi > 0.0):
            if attempts >= 4:
                return (OP_NO_BRACKET, 0, math.nan, math.nan, math.nan, math.nan, math.nan,
                        min(r_lo, r_hi))
            attempts += 1
            lo -= span
            hi += span
            g_hi, r_hi, it_hi, is_hi, vse_hi, vsc_hi = residual(
                hi, v_dev, d_eff, phit_j, phib_ev, n_eff, vth, area, a_star, temp, alpha_r,
                beta, e, m, h, r_se, i_floor)
            g_lo, r_lo, it_lo, is_lo, vse_lo, vsc_lo = residual(
                lo, v_dev, d_eff, phit_j, phib_ev, n_eff, vth, area, a_star, temp, alpha_r,
                beta, e, m, h, r_se, i_floor)

        best = min(r_lo, r_hi)
        neg_is_lo = g_lo < 0.0
        mid = lo
        g, r, i_tb, i_sc, v_se, v_sc = g_lo, r_lo, it_lo, is_lo, vse_lo, vsc_lo
        for it in range(1, max_iters + 1):
            mid = 0.5 * (lo + hi)
            g, r, i_tb, i_sc, v_se, v_sc = residual(
                mid, v_dev, d_eff, phit_j, phib_ev, n_eff, vth, area, a_star, temp,
                alpha_r, beta, e, m, h, r_se, i_floor)
            if r < best:
                best = r
            if g == 0.0 or (r <= xi_tol and hi - lo <= v_tol):
                return OP_OK, it, mid, i_tb, i_sc, v_se, v_sc, r
            if mid == lo or mid == hi:
                # bracket exhausted at double resolution
                if r <= xi_tol:
                    return OP_OK, it, mid, i_tb, i_sc, v_se, v_sc, r
                return OP_MAX_ITERS, it, mid, i_tb, i_sc, v_se, v_sc, best
            if (g < 0.0) == neg_is_lo:
                lo = mid
            else:
                hi = mid
        return OP_MAX_ITERS, max_iters, mid, i_tb, i_sc, v_se, v_sc, best

    return {"simmons": simmons, "schottky": schottky, "solve_op": solve_op}


def _identity(fn):
    return fn


SCALAR_IMPLS = {
    "numba": _build_scalar_kernels(njit),
    "numpy": _build_scalar_kernels(_identity),
}
_scalar = SCALAR_IMPLS["numba" if USE_NUMBA else "numpy"]
simmons_kernel = _scalar["simmons"]
schottky_kernel = _scalar["schottky"]
solve_op_kernel = _scalar["solve_op"]
