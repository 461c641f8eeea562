import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effham.errors import NonFiniteError
from effham.fields import ConstantField, LinearRampField, RotatingConeField, TabulatedField

from conftest import make_tabulated_field

ALL_KINDS = [
    ConstantField((0.3, -1.1, 2.0)),
    RotatingConeField(1.0, np.pi / 3, 0.05),
    LinearRampField((0.0, 0.0, 1.0), (1.0, -0.5, 0.2)),
    make_tabulated_field(5, (2.0, 4.0)),
]


@pytest.mark.parametrize("f", ALL_KINDS, ids=lambda f: type(f).__name__)
def test_finite_and_conjugate_pair(f):
    for t in np.linspace(0.0, 1.0, 17):
        b = f.evaluate(float(t))
        assert b.shape == (3,) and np.all(np.isfinite(b))
        bp, bm, b3 = f.b_components(float(t))
        assert bm == bp.conjugate()
        assert b3 == pytest.approx(b[2])


@pytest.mark.parametrize("f", ALL_KINDS, ids=lambda f: type(f).__name__)
def test_evaluate_many_matches_scalar(f):
    ts = np.linspace(0.0, 1.0, 9)
    many = f.evaluate_many(ts)
    each = np.stack([f.evaluate(float(t)) for t in ts])
    np.testing.assert_allclose(many, each, atol=1e-14)


def test_constant_returns_b():
    f = ConstantField((1.0, 2.0, 3.0))
    np.testing.assert_array_equal(f.evaluate(17.3), [1.0, 2.0, 3.0])


def test_ramp_midpoint_and_clamping():
    f = LinearRampField((0.0, 0.0, 0.0), (2.0, -2.0, 4.0), t0=1.0, t1=3.0)
    np.testing.assert_allclose(f.evaluate(2.0), [1.0, -1.0, 2.0])
    np.testing.assert_allclose(f.evaluate(0.0), f.evaluate(1.0))
    np.testing.assert_allclose(f.evaluate(5.0), f.evaluate(3.0))


class TestRotatingCone:
    @given(
        theta=st.floats(0.1, 3.0),
        w=st.floats(1e-4, 0.02),
        sense=st.sampled_from([-1.0, 1.0]),
        b0=st.floats(0.5, 3.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_magnitude_and_cone_angle(self, theta, w, sense, b0):
        f = RotatingConeField(b0, theta, sense * w * b0)
        ts = np.linspace(0.0, f.period, 13)
        b = f.evaluate_many(ts)
        np.testing.assert_allclose(np.linalg.norm(b, axis=1), b0, rtol=1e-12)
        # B(t) keeps the cone angle theta with the precession axis
        cosangles = b @ f.axis / b0
        np.testing.assert_allclose(cosangles, np.cos(theta), atol=1e-12)

    def test_dressed_start_points_along_z(self):
        f = RotatingConeField(1.0, np.pi / 3, 0.01)
        b_eff0 = f.evaluate(0.0) + f.omega * f.axis
        assert abs(b_eff0[0]) <= 1e-12 and abs(b_eff0[1]) <= 1e-12
        assert b_eff0[2] > 0.0

    def test_period_closes_the_loop(self):
        f = RotatingConeField(2.0, 1.1, 0.07)
        np.testing.assert_allclose(f.evaluate(0.0), f.evaluate(f.period), atol=1e-12)
        assert f.period == pytest.approx(2.0 * np.pi / 0.07)

    def test_static_limit_is_aligned(self):
        f = RotatingConeField(1.5, 0.8, 0.0)
        np.testing.assert_allclose(f.evaluate(3.0), [0.0, 0.0, 1.5], atol=1e-12)
        np.testing.assert_allclose(f.axis, [np.sin(0.8), 0.0, np.cos(0.8)], atol=1e-12)

    def test_rejects_non_positive_magnitude(self):
        with pytest.raises(ValueError):
            RotatingConeField(0.0, 1.0, 0.1)


class TestTabulated:
    def test_hits_the_samples(self):
        ts = np.linspace(0.0, 2.0, 9)
        rng = np.random.default_rng(2)
        vals = rng.normal(size=(9, 3))
        f = TabulatedField(ts, vals)
        np.testing.assert_allclose(f.evaluate_many(ts), vals, atol=1e-12)

    def test_rejects_decreasing_times(self):
        with pytest.raises(ValueError):
            TabulatedField([0.0, 1.0, 0.5, 2.0], np.zeros((4, 3)))

    def test_rejects_nan_samples(self):
        vals = np.zeros((4, 3))
        vals[2, 1] = np.nan
        with pytest.raises(NonFiniteError):
            TabulatedField([0.0, 1.0, 2.0, 3.0], vals)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            TabulatedField([0.0, 1.0, 2.0], np.zeros((4, 3)))
