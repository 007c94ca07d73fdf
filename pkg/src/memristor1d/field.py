"""Eulerian 1D grid over the electrolyte: CIC deposit, Poisson solve, field gather.

Node 0 sits at the Au/NbxOy (Schottky) interface, node ``n_nodes-1`` at the
NbxOy/Al2O3 interface.
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DomainError
from .params import DeviceParams

__all__ = ["FieldGrid", "deposit_cic", "solve_poisson", "efield_at", "node_volumes"]


class FieldGrid:
    """Node arrays for charge density, potential and field.

    Attributes
    ----------
    n_nodes : int
    length : float
        Electrolyte thickness ``l_SE`` (m).
    dx : float
        Node spacing ``length / (n_nodes - 1)`` (m).
    eps : float
        Absolute permittivity (F/m).
    x, rho, phi, E_node : ndarray
        Node coordinates (m), charge density (C/m^3), potential (V) and field (V/m).
    """

    def __init__(self, n_nodes: int, length: float, eps: float):
        if n_nodes < 3:
            raise ValueError("n_nodes must be >= 3")
        if not length > 0 or not eps > 0:
            raise ValueError("length and eps must be positive")
        self.n_nodes = int(n_nodes)
        self.length = float(length)
        self.eps = float(eps)
        self.dx = self.length / (self.n_nodes - 1)
        self.x = np.arange(self.n_nodes) * self.dx
        self.x[-1] = self.length
        self.rho = np.zeros(self.n_nodes)
        self.phi = np.zeros(self.n_nodes)
        self.E_node = np.zeros(self.n_nodes)

    @classmethod
    def for_device(cls, params: DeviceParams, n_nodes: int = 101) -> "FieldGrid":
        return cls(n_nodes, params.l_SE, params.eps)

    def copy(self) -> "FieldGrid":
        other = FieldGrid(self.n_nodes, self.length, self.eps)
        other.rho[:] = self.rho
        other.phi[:] = self.phi
        other.E_node[:] = self.E_node
        return other

    def total_charge(self) -> float:
        """Deposited sheet charge recovered from ``rho`` (C/m^2)."""
        return float(np.sum(self.rho * node_volumes(self)))

    # unchecked fast paths used by the time stepper

    def _deposit(self, positions: np.ndarray, charges: np.ndarray) -> None:
        kernels.deposit(positions, charges, self.n_nodes, self.dx, self.rho)

    def _solve(self, phi_left: float, phi_right: float) -> None:
        kernels.poisson(self.rho, self.eps, self.dx, float(phi_left), float(phi_right),
                        self.phi)
        kernels.node_field(self.phi, self.dx, self.E_node)

    def _gather(self, positions: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        if out is None:
            out = np.empty_like(positions)
        return kernels.gather(self.E_node, positions, self.dx, out)


def node_volumes(grid: FieldGrid) -> np.ndarray:
    vol = np.full(grid.n_nodes, grid.dx)
    vol[0] = vol[-1] = 0.5 * grid.dx
    return vol


def _check_domain(grid: FieldGrid, positions: np.ndarray) -> None:
    bad = np.flatnonzero(~((positions >= 0.0) & (positions <= grid.length)))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"particle {i} at x={positions[i]!r} lies outside "
                          f"[0, {grid.length!r}]", index=i)


def deposit_cic(grid: FieldGrid, positions, sheet_charges) -> FieldGrid:
    """Linear (cloud-in-cell) charge assignment of sheet charges (C/m^2) to nodes.

    A particle at ``x`` between nodes ``j`` and ``j+1`` gives ``(1-f)`` of its
    charge to ``j`` and ``f`` to ``j+1`` with ``f = (x - x_j)/dx``. Node charge is
    divided by the node volume: ``dx`` inside, ``dx/2`` at the two boundary nodes.
    """
    positions = np.ascontiguousarray(positions, dtype=np.float64)
    charges = np.ascontiguousarray(np.broadcast_to(sheet_charges, positions.shape),
                                   dtype=np.float64)
    if positions.ndim != 1:
        raise ValueError("positions must be one-dimensional")
    _check_domain(grid, positions)
    grid._deposit(positions, charges)
    return grid


def solve_poisson(grid: FieldGrid, phi_left: float, phi_right: float) -> FieldGrid:
    """Solve ``eps * phi'' = -rho`` with Dirichlet ends; also refreshes ``E_node``."""
    grid._solve(phi_left, phi_right)
    return grid


def efield_at(grid: FieldGrid, x):
    """Electric field (V/m) at position(s) ``x`` by linear interpolation of ``E_node``."""
    scalar = np.ndim(x) == 0
    positions = np.atleast_1d(np.asarray(x, dtype=np.float64))
    _check_domain(grid, positions)
    out = grid._gather(np.ascontiguousarray(positions))
    return float(out[0]) if scalar else out
