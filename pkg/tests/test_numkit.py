import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effham.errors import DimensionError, NonFiniteError, OdeSingularityError, SingularMatrixError
from effham.numkit import OdeSettings, mat_exp, ode_integrate, solve_linear, solve_tridiagonal


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


class TestMatExp:
    def test_zero_is_identity(self):
        np.testing.assert_allclose(mat_exp(np.zeros((2, 2))), np.eye(2), atol=1e-15)

    def test_diagonal_jz_rotation(self):
        # exp(-i pi Jz) for j = 1/2
        a = -1j * np.pi * np.diag([0.5, -0.5])
        expected = np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)])
        np.testing.assert_allclose(mat_exp(a), expected, atol=1e-14)

    def test_sigma_x_quarter_turn_vs_taylor(self):
        a = np.array([[0.0, -1j * np.pi / 4], [-1j * np.pi / 4, 0.0]])
        c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
        closed = np.array([[c, -1j * s], [-1j * s, c]])
        taylor = np.zeros((2, 2), dtype=complex)
        term = np.eye(2, dtype=complex)
        for k in range(20):
            taylor += term
            term = term @ a / (k + 1)
        np.testing.assert_allclose(mat_exp(a), closed, atol=1e-13)
        np.testing.assert_allclose(mat_exp(a), taylor, atol=1e-13)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            mat_exp(np.zeros((2, 3)))

    def test_rejects_nan(self):
        a = np.zeros((2, 2))
        a[0, 1] = np.nan
        with pytest.raises(NonFiniteError):
            mat_exp(a)

    @given(seed=st.integers(0, 2**31), n=st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_inverse_property(self, seed, n):
        rng = np.random.default_rng(seed)
        a = random_complex(rng, (n, n))
        norm = np.linalg.norm(a, 2)
        if norm > 5.0:
            a *= 5.0 / norm
        np.testing.assert_allclose(mat_exp(a) @ mat_exp(-a), np.eye(n), atol=1e-11)

    @given(seed=st.integers(0, 2**31), n=st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_anti_hermitian_gives_unitary(self, seed, n):
        rng = np.random.default_rng(seed)
        h = random_complex(rng, (n, n))
        h = (h + h.conj().T) / 2
        u = mat_exp(-1j * h)
        assert np.linalg.norm(u.conj().T @ u - np.eye(n), 2) <= 1e-11


class TestSolveLinear:
    def test_identity_solve(self):
        rng = np.random.default_rng(0)
        b = random_complex(rng, (3, 2))
        np.testing.assert_allclose(solve_linear(np.eye(3), b), b, atol=1e-14)

    def test_diagonal_inverse(self):
        x = solve_linear(np.diag([2.0, 4.0]), np.eye(2))
        np.testing.assert_allclose(x, np.diag([0.5, 0.25]), atol=1e-14)

    def test_residual_random_8x8(self):
        rng = np.random.default_rng(7)
        a = random_complex(rng, (8, 8)) + 4.0 * np.eye(8)
        b = random_complex(rng, (8, 8))
        x = solve_linear(a, b)
        assert np.linalg.norm(a @ x - b, 2) <= 1e-10 * np.linalg.norm(b, 2)

    def test_singular_raises_with_pivot(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularMatrixError) as exc:
            solve_linear(a, np.eye(2))
        assert exc.value.pivot >= 0.0

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=40, deadline=None)
    def test_residual_property(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        a = random_complex(rng, (n, n))
        # push the condition number down by a diagonal shift
        a += (1.0 + np.linalg.norm(a, 2)) * np.eye(n)
        b = random_complex(rng, (n,))
        x = solve_linear(a, b)
        assert np.linalg.norm(a @ x - b) <= 1e-10 * np.linalg.norm(b)


class TestSolveTridiagonal:
    def test_matches_dense(self):
        rng = np.random.default_rng(3)
        n = 12
        diag = random_complex(rng, n)
        lo = random_complex(rng, n - 1)
        hi = random_complex(rng, n - 1)
        a = np.diag(diag) + np.diag(lo, -1) + np.diag(hi, 1)
        b = random_complex(rng, n)
        np.testing.assert_allclose(
            solve_tridiagonal(diag, lo, hi, b), solve_linear(a, b), atol=1e-11
        )


class TestOdeIntegrate:
    def test_zero_derivative(self):
        res = ode_integrate(lambda t, y: 0.0 * y, [1.0, 0.0], (0.0, 2.0))
        np.testing.assert_allclose(res.y_end, [1.0, 0.0], atol=1e-12)

    def test_exponential_decay(self, tight_settings):
        res = ode_integrate(lambda t, y: -y, [1.0], (0.0, 1.0), settings=tight_settings)
        np.testing.assert_allclose(res.y_end[0], np.exp(-1.0), rtol=1e-10)

    def test_modulus_conservation(self, tight_settings):
        res = ode_integrate(lambda t, y: 1j * y, [1.0], (0.0, 100.0), settings=tight_settings)
        assert abs(abs(res.y_end[0]) - 1.0) <= 1e-9

    def test_finite_time_blowup_raises(self):
        # y' = y^2 from y=1 diverges at t = 1
        with pytest.raises(OdeSingularityError) as exc:
            ode_integrate(lambda t, y: y * y, [1.0], (0.0, 2.0))
        assert 0.9 <= exc.value.time <= 1.05

    def test_rejects_non_finite_y0(self):
        with pytest.raises(NonFiniteError):
            ode_integrate(lambda t, y: y, [np.nan], (0.0, 1.0))

    @given(seed=st.integers(0, 2**31), t_final=st.floats(0.5, 10.0))
    @settings(max_examples=15, deadline=None)
    def test_linear_system_matches_mat_exp(self, seed, t_final):
        rng = np.random.default_rng(seed)
        h = random_complex(rng, (4, 4))
        h = (h + h.conj().T) / 2
        h /= max(1.0, np.linalg.norm(h, 2))
        y0 = random_complex(rng, (4,))
        res = ode_integrate(
            lambda t, y: -1j * (h @ y),
            y0,
            (0.0, t_final),
            settings=OdeSettings(rel_tol=1e-11, abs_tol=1e-13),
        )
        expected = mat_exp(-1j * t_final * h) @ y0
        assert np.linalg.norm(res.y_end - expected) <= 1e-8

    def test_dense_output_and_events(self):
        hit = lambda t, y: y[0].real - 0.5  # noqa: E731
        hit.terminal = True
        hit.direction = -1
        res = ode_integrate(lambda t, y: -y, [1.0], (0.0, 5.0), events=[hit])
        assert res.status == 1
        np.testing.assert_allclose(res.t_events[0][0], np.log(2.0), rtol=1e-6)
