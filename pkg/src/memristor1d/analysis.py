"""I-V loop metrics and cycle-to-cycle / device-to-device variability statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import SweepTrace
from .errors import AlignmentError, InsufficientDataError

__all__ = [
    "RunMetrics",
    "VariabilityReport",
    "shoelace_area",
    "loop_area",
    "split_cycles",
    "compute_metrics",
    "variability_report",
    "rsd",
]


@dataclass(frozen=True)
class RunMetrics:
    loop_area: float  # V*A
    R_on: float  # ohm
    R_off: float  # ohm
    onoff_ratio: float
    set_branch_I_at_peak: float  # A
    reset_branch_I_at: float  # A, at reset_voltage
    read_voltage: float = 0.5
    reset_voltage: float = -1.0
    degenerate: bool = False


@dataclass
class VariabilityReport:
    rsd_set: float
    rsd_reset: float
    set_currents: np.ndarray
    reset_currents: np.ndarray
    metrics: list[RunMetrics] = field(default_factory=list)

    def onoff_table(self) -> list[tuple[int, float, float, float]]:
        return [(k, m.R_on, m.R_off, m.onoff_ratio) for k, m in enumerate(self.metrics)]


def shoelace_area(v: np.ndarray, i: np.ndarray) -> float:
    """Absolute area of the closed polygon through the points ``(v, i)``."""
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    if v.size < 3:
        return 0.0
    return 0.5 * abs(float(np.dot(v, np.roll(i, -1)) - np.dot(np.roll(v, -1), i)))


def loop_area(v: np.ndarray, i: np.ndarray) -> float:
    """Sum of the absolute shoelace areas of the positive- and negative-bias lobes.

    A pinched loop traverses its two lobes in opposite senses, so a single
    signed shoelace over the whole cycle would let them cancel.
    """
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    pos = v >= 0
    neg = v <= 0
    return shoelace_area(v[pos], i[pos]) + shoelace_area(v[neg], i[neg])


def _sorted(trace: SweepTrace) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(trace.t, kind="stable")
    return trace.V[order], trace.I[order]


def _cycle_bounds(v: np.ndarray) -> list[tuple[int, int]]:
    """Index ranges ``[start, stop]`` of the full cycles contained in ``v``.

    A cycle starts at an upward zero crossing and ends at the next one (or at
    the last sample when the voltage has returned to zero).
    """
    if v.size < 4:
        return []
    starts = [int(k) for k in np.flatnonzero((v[:-1] <= 0) & (v[1:] > 0))]
    if not starts:
        return []
    step = float(np.max(np.abs(np.diff(v))))
    bounds = []
    for a, b in zip(starts, starts[1:] + [v.size - 1]):
        seg = v[a:b + 1]
        closed = b != v.size - 1 or abs(v[b]) <= step * (1 + 1e-9)
        if closed and seg.max() > 0 and seg.min() < 0:
            bounds.append((a, b))
    return bounds


def split_cycles(trace: SweepTrace) -> list[SweepTrace]:
    """Split a multi-cycle trace into one trace per full cycle (rows sorted by t)."""
    order = np.argsort(trace.t, kind="stable")
    ordered = SweepTrace({k: v[order] for k, v in trace.columns.items()},
                         None if trace.ions is None else trace.ions[order],
                         dict(trace.metadata))
    return [ordered.slice(a, b + 1) for a, b in _cycle_bounds(ordered.V)]


def _nearest(v: np.ndarray, idx: np.ndarray, target: float) -> int:
    return int(idx[np.argmin(np.abs(v[idx] - target))])


def compute_metrics(trace: SweepTrace, read_voltage: float = 0.5,
                    reset_voltage: float = -1.0) -> RunMetrics:
    """Loop area and read-out resistances of the last full cycle.

    ``R_off`` is read on the rising (pre-set) branch and ``R_on`` on the falling
    (post-set) branch, each at the sample nearest ``read_voltage``.
    """
    v, i = _sorted(trace)
    bounds = _cycle_bounds(v)
    if not bounds:
        raise InsufficientDataError("trace does not contain a full voltage cycle")
    a, b = bounds[-1]
    v, i = v[a:b + 1], i[a:b + 1]
    p = int(np.argmax(v))
    neg = np.flatnonzero(v < 0)
    rise = np.arange(0, p + 1)
    fall_end = int(neg[0]) if neg.size else v.size
    fall = np.arange(p, fall_end)
    if rise.size < 2 or fall.size < 2 or neg.size < 2:
        raise InsufficientDataError("cycle has too few samples on one of its branches")

    k_off = _nearest(v, rise, read_voltage)
    k_on = _nearest(v, fall, read_voltage)
    r_off = v[k_off] / i[k_off] if i[k_off] != 0 else math.inf
    r_on = v[k_on] / i[k_on] if i[k_on] != 0 else math.inf
    degenerate = not (math.isfinite(r_on) and math.isfinite(r_off)) or r_on == 0
    ratio = math.nan if degenerate else r_off / r_on

    m = int(neg[np.argmin(v[neg])])
    reset_branch = np.arange(int(neg[0]), m + 1)
    k_reset = _nearest(v, reset_branch, reset_voltage)
    step = float(np.max(np.abs(np.diff(v))))
    i_reset = i[k_reset] if abs(v[k_reset] - reset_voltage) <= step else math.nan

    return RunMetrics(
        loop_area=loop_area(v, i),
        R_on=float(r_on),
        R_off=float(r_off),
        onoff_ratio=float(ratio),
        set_branch_I_at_peak=float(i[p]),
        reset_branch_I_at=float(i_reset),
        read_voltage=read_voltage,
        reset_voltage=reset_voltage,
        degenerate=bool(degenerate),
    )


def rsd(values) -> float:
    """Relative standard deviation (sample std over |mean|)."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise InsufficientDataError("need at least two values for a spread")
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1))
    if std == 0.0:
        return 0.0
    return std / abs(mean) if mean != 0 else math.inf


def _aligned_current(trace: SweepTrace, idx_filter, target: float, label: str) -> float:
    v, i = _sorted(trace)
    idx = idx_filter(v)
    if idx.size == 0:
        raise AlignmentError(f"no samples on the {label} branch")
    k = _nearest(v, idx, target)
    tol = float(np.max(np.abs(np.diff(v)))) * (1 + 1e-9)
    if abs(v[k] - target) > tol:
        raise AlignmentError(f"{label} branch has no sample within {tol:.3g} V of "
                             f"{target:.3g} V (nearest {v[k]:.6g} V)")
    return float(i[k])


def variability_report(traces: Sequence[SweepTrace], read_voltage: float = 0.5,
                       reset_voltage: float = -1.0,
                       set_voltage: float | None = None) -> VariabilityReport:
    """Spread of the set-branch peak current and the reset-branch current.

    Each trace is one cycle (use :func:`split_cycles` for a multi-cycle run).
    ``set_voltage`` defaults to the peak voltage of the first trace.
    """
    if len(traces) < 2:
        raise InsufficientDataError("variability needs at least two cycles or devices")
    if set_voltage is None:
        set_voltage = float(np.max(traces[0].V))

    def set_branch(v):
        return np.arange(0, int(np.argmax(v)) + 1)

    def reset_branch(v):
        neg = np.flatnonzero(v < 0)
        if neg.size == 0:
            return neg
        return np.arange(int(neg[0]), int(neg[np.argmin(v[neg])]) + 1)

    set_i = np.array([_aligned_current(tr, set_branch, set_voltage, "set") for tr in traces])
    reset_i = np.array([_aligned_current(tr, reset_branch, reset_voltage, "reset")
                        for tr in traces])
    metrics = [compute_metrics(tr, read_voltage, reset_voltage) for tr in traces]
    return VariabilityReport(rsd(set_i), rsd(reset_i), set_i, reset_i, metrics)
