"""Shared fixtures: seeded random smooth fields at two strength classes."""

import numpy as np
import pytest

from effham.fields import TabulatedField
from effham.numkit import OdeSettings


def make_tabulated_field(seed, integral_range, t_final=1.0, n_knots=41):
    """Random low-harmonic field, rescaled so integral |B| dt hits the range.

    Four harmonics per component with 1/k amplitude decay keep the curves
    smooth enough for the spline while preventing accidental symmetry.
    """
    rng = np.random.default_rng(seed)
    ts = np.linspace(0.0, t_final, n_knots)
    vals = np.zeros((n_knots, 3))
    for c in range(3):
        amps = rng.normal(size=4) / np.arange(1.0, 5.0)
        phs = rng.uniform(0.0, 2.0 * np.pi, size=4)
        for k in range(4):
            vals[:, c] += amps[k] * np.cos(2.0 * np.pi * (k + 1) * ts / t_final + phs[k])
    raw = TabulatedField(ts, vals)
    fine = np.linspace(0.0, t_final, 4001)
    norm = np.trapezoid(np.linalg.norm(raw.evaluate_many(fine), axis=1), fine)
    target = rng.uniform(*integral_range)
    return TabulatedField(ts, vals * (target / norm))


def strong_field(seed):
    """Integral of |B| in [9, 18]: drives gauge restarts on many seeds."""
    return make_tabulated_field(seed, (9.0, 18.0))


def gentle_field(seed):
    """Integral of |B| in [1.2, 2.2]: smooth, restart-free trajectories."""
    return make_tabulated_field(seed, (1.2, 2.2))


@pytest.fixture
def tight_settings():
    return OdeSettings(rel_tol=1e-12, abs_tol=1e-14)
