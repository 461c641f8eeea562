"""Time-dependent drive fields B(t) for the two-level / spin-j propagators.

Every field maps a time to a real 3-vector (Bx, By, Bz).  The Hamiltonian
convention used throughout the package is H(t) = -J . B(t).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import NonFiniteError

__all__ = [
    "Field",
    "ConstantField",
    "RotatingConeField",
    "LinearRampField",
    "TabulatedField",
]


class Field:
    """Base accessor: evaluate(t) -> (Bx, By, Bz) as a float array.

    Subclasses implement ``evaluate``; complex components are never produced,
    so B- is always the conjugate of B+.
    """

    def evaluate(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t: float) -> np.ndarray:
        return self.evaluate(t)

    def evaluate_many(self, ts) -> np.ndarray:
        """Evaluate at an array of times, shape (n, 3).  Subclasses override
        with vectorized math where it is natural."""
        ts = np.asarray(ts, dtype=float)
        return np.stack([self.evaluate(float(t)) for t in ts])

    def b_components(self, t: float) -> tuple[complex, complex, float]:
        """Return (B+, B-, B3) with B+- = Bx +- i By."""
        bx, by, bz = self.evaluate(t)
        bp = complex(bx, by)
        return bp, bp.conjugate(), float(bz)


@dataclass
class ConstantField(Field):
    b: tuple[float, float, float]

    def evaluate(self, t: float) -> np.ndarray:
        return np.asarray(self.b, dtype=float)

    def evaluate_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.broadcast_to(np.asarray(self.b, dtype=float), (ts.size, 3)).copy()


@dataclass
class RotatingConeField(Field):
    """Field of fixed magnitude b0 precessing on a cone of polar angle theta.

    The cone's orientation is fixed by requiring the rotating-frame
    effective field at t = 0, B(0) + omega * axis, to point along +z.
    The first basis state then starts exactly on the dressed precession
    axis (the spin-locked state), so over one period it traces the closed
    cone swept by that axis and su2.phase_split reads off the geometric
    phase of that path with no startup-precession transient.  As
    omega -> 0 the orientation reduces to B(0) = (0, 0, b0) with the axis
    at polar angle theta, and the one-period geometric phase of the
    aligned spin-1/2 state approaches Berry's value -pi*(1 - cos theta).

    The axis polar angle a solves sin(a - theta) + (omega/b0) sin a = 0;
    B(0) sits at polar angle a - theta in the xz-plane and precesses about
    the axis at rate omega, keeping angle theta with it throughout.
    """

    b0: float
    theta: float
    omega: float

    def __post_init__(self) -> None:
        if self.b0 <= 0.0:
            raise ValueError("b0 must be positive")
        th = float(self.theta)
        w = self.omega / self.b0
        if w == 0.0 or np.sin(th) == 0.0:
            a = th
        else:
            # f(0) = -sin(theta) and f(pi) = +sin(theta) bracket the root.
            a = brentq(lambda x: np.sin(x - th) + w * np.sin(x), 0.0, np.pi)
        self.axis = np.array([np.sin(a), 0.0, np.cos(a)])
        b_start = self.b0 * np.array([np.sin(a - th), 0.0, np.cos(a - th)])
        par = np.dot(b_start, self.axis) * self.axis
        self._b_par = par
        self._b_perp = b_start - par
        self._n_cross = np.cross(self.axis, b_start)

    def evaluate(self, t: float) -> np.ndarray:
        c, s = np.cos(self.omega * t), np.sin(self.omega * t)
        # Rodrigues rotation of B(0) by omega*t about the axis
        return self._b_par + self._b_perp * c + self._n_cross * s

    def evaluate_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        c = np.cos(self.omega * ts)[:, None]
        s = np.sin(self.omega * ts)[:, None]
        return self._b_par[None, :] + self._b_perp[None, :] * c + self._n_cross[None, :] * s

    @property
    def period(self) -> float:
        return 2.0 * np.pi / abs(self.omega)


@dataclass
class LinearRampField(Field):
    """Componentwise linear ramp from b_start at t0 to b_end at t1, clamped outside."""

    b_start: tuple[float, float, float]
    b_end: tuple[float, float, float]
    t0: float = 0.0
    t1: float = 1.0

    def evaluate(self, t: float) -> np.ndarray:
        x = np.clip((t - self.t0) / (self.t1 - self.t0), 0.0, 1.0)
        a = np.asarray(self.b_start, dtype=float)
        b = np.asarray(self.b_end, dtype=float)
        return a + (b - a) * x

    def evaluate_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        x = np.clip((ts - self.t0) / (self.t1 - self.t0), 0.0, 1.0)
        a = np.asarray(self.b_start, dtype=float)
        b = np.asarray(self.b_end, dtype=float)
        return a[None, :] + (b - a)[None, :] * x[:, None]


@dataclass
class TabulatedField(Field):
    """Cubic-spline interpolation of sampled (Bx, By, Bz) values.

    times: strictly increasing sample times, shape (n,)
    values: field samples, shape (n, 3)
    """

    times: np.ndarray
    values: np.ndarray
    _spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.times.shape[0], 3):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{self.times.shape[0]} sample times"
            )
        if not (np.all(np.isfinite(self.times)) and np.all(np.isfinite(self.values))):
            raise NonFiniteError("tabulated field contains non-finite samples")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        self._spline = CubicSpline(self.times, self.values, axis=0)

    def evaluate(self, t: float) -> np.ndarray:
        return self._spline(t)

    def evaluate_many(self, ts) -> np.ndarray:
        return self._spline(np.asarray(ts, dtype=float))
