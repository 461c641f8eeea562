"""Exception types shared across the package."""

from __future__ import annotations


class EffhamError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(EffhamError):
    """Operands have incompatible or non-square shapes."""


class NonFiniteError(EffhamError):
    """Input contains NaN or infinite entries."""


class SingularMatrixError(EffhamError):
    """Linear solve hit a (numerically) singular matrix.

    Carries the offending pivot magnitude so callers can report how close
    to singular the system was.
    """

    def __init__(self, message: str, pivot: float):
        super().__init__(f"{message} (smallest pivot magnitude {pivot:.3e})")
        self.pivot = pivot


class SingularResolventError(SingularMatrixError):
    """Resolvent (E - QHQ)^-1 requested at (or numerically on top of) an
    eigenvalue of QHQ with Im E = 0."""

    def __init__(self, energy: complex, pivot: float):
        super().__init__(f"resolvent singular at E = {energy}", pivot)
        self.energy = energy


class OdeSingularityError(EffhamError):
    """Adaptive integrator could not continue (step-size underflow).

    Carries the failure time; the gauge-restart logic uses it to decide
    whether a coordinate singularity was reached without a restartable
    threshold crossing.
    """

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (at t = {time!r})")
        self.time = time


class GridError(EffhamError):
    """Sampling grids are misaligned or unusable for the requested quadrature."""


class NoContinuumError(EffhamError):
    """Resonance scan window does not overlap the model's discretized band."""


class ConditioningError(EffhamError):
    """Trial evolution operator too ill-conditioned to invert reliably."""


class ConfigError(EffhamError):
    """Scenario configuration is malformed; message carries the field path."""
