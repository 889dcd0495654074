"""Exception hierarchy for the simulator."""


class CQADError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensionError(CQADError, ValueError):
    """A Hilbert-space dimension or truncation is out of range."""


class DimensionMismatchError(CQADError, ValueError):
    """Operands live on different Hilbert spaces."""


class DegenerateQubitError(CQADError, ValueError):
    """The transmon frequency formula is invalid (E_J = 0)."""


class DispersiveInvalidError(CQADError, ValueError):
    """A dispersive formula was evaluated at zero detuning."""


class SolverError(CQADError, RuntimeError):
    """Base class for steady-state solver failures."""

    def __init__(self, message, *, probe=None, flux=None):
        self.probe = probe
        self.flux = flux
        where = []
        if flux is not None:
            where.append(f"flux={flux:.9g}")
        if probe is not None:
            where.append(f"probe={probe:.9g} MHz")
        if where:
            message = f"{message} (at {', '.join(where)})"
        super().__init__(message)


class NonUniqueSteadyStateError(SolverError):
    """The trace-constrained Liouvillian system is singular."""


class ConvergenceError(SolverError):
    """The computed steady state does not satisfy L vec(rho) = 0."""


class PopulationConvergenceError(SolverError):
    """The secular population series does not converge below the level cap."""


class UndefinedTransmissionError(CQADError, ValueError):
    """Transmission requested with zero probe strength."""


class ConfigError(CQADError, ValueError):
    """Invalid run configuration.

    Carries the offending ``key`` and 1-based ``line`` when known.
    """

    def __init__(self, message, *, key=None, line=None):
        self.key = key
        self.line = line
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if key is not None:
            prefix.append(f"key '{key}'")
        if prefix:
            message = f"{', '.join(prefix)}: {message}"
        super().__init__(message)
