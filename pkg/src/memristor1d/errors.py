"""Exception types raised by the simulator."""


class SimulationError(Exception):
    """Base class for all errors raised by memristor1d."""


class ConfigError(SimulationError, ValueError):
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class DomainError(SimulationError, ValueError):
    """A position lies outside the electrolyte ``[0, l_SE]``."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DegenerateStateError(SimulationError, ValueError):
    """An effective barrier parameter became non-positive (lambda*q <= -1)."""


class BracketingError(SimulationError):
    pass


class ConvergenceError(SimulationError):
    def __init__(self, message, best_residual=float("nan"), step=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.step = step


class InsufficientDataError(SimulationError, ValueError):
    pass


class AlignmentError(SimulationError, ValueError):
    pass


class SimmonsRangeWarning(RuntimeWarning):
    """Tunnel bias exceeds the barrier height; the Simmons form is outside its range."""


class TraceIOError(SimulationError, OSError):
    """Reading or writing a trace file failed; ``path`` names the file."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path
