"""One-dimensional particle-in-cell simulation of a double-barrier memristive device.

Mobile oxygen ions drift in the self-consistent field of a thin electrolyte layer;
their mean distance from the Schottky contact sets the barrier parameters of a
Schottky / electrolyte / tunnel-barrier series circuit whose operating point gives
the device current.
"""
from ._backend import backend_name
from .analysis import (RunMetrics, VariabilityReport, compute_metrics, loop_area, rsd,
                       split_cycles, variability_report)
from .circuit import OperatingPoint, solve_operating_point
from .currents import effective_barriers, ohmic_drop, schottky_current, tunnel_current
from .engine import (SweepTrace, run, run_amplitude_study, run_c2c, run_d2d, step,
                     waveform_value)
from .errors import (AlignmentError, BracketingError, ConfigError, ConvergenceError,
                     DegenerateStateError, DomainError, InsufficientDataError,
                     SimmonsRangeWarning, SimulationError, TraceIOError)
from .field import FieldGrid, deposit_cic, efield_at, solve_poisson
from .io import read_trace_csv, write_trace_csv
from .ions import IonEnsemble, drift_velocity, init_random, internal_state, perturb, push
from .params import (CONSTANTS, DeviceParams, SimConfig, StochasticConfig, WaveformSpec,
                     dump_config, load_config, params_hash)

__version__ = "0.1.0"
