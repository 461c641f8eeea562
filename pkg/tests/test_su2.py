import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effham.fields import ConstantField
from effham.numkit import OdeSettings, mat_exp
from effham.su2 import (
    SpinRepresentation,
    density_matrix,
    direct_propagate,
    effective_hamiltonian_td,
    evolve_state,
    integrate_mu,
    phase_split,
    reconstruct_evolution,
    split_u1_u2,
    u1_frame_connection,
    u1_frame_hamiltonian,
)

from conftest import gentle_field, strong_field

TIGHT = OdeSettings(rel_tol=1e-12, abs_tol=1e-14)
HALF = SpinRepresentation.from_j(0.5)


class TestRepresentation:
    @pytest.mark.parametrize("j", [0.5, 1.0, 1.5, 2.5])
    def test_commutators(self, j):
        rep = SpinRepresentation.from_j(j)
        assert rep.dim == int(2 * j + 1)
        jz, jp, jm = rep.jz, rep.jp, rep.jm
        assert np.abs(jz @ jp - jp @ jz - jp).max() <= 1e-12
        assert np.abs(jz @ jm - jm @ jz + jm).max() <= 1e-12
        assert np.abs(jp @ jm - jm @ jp - 2 * jz).max() <= 1e-12

    def test_hamiltonian_hermitian_for_real_field(self):
        rep = SpinRepresentation.from_j(1.0)
        bp = complex(0.7, -0.3)
        h = rep.hamiltonian(bp, bp.conjugate(), 1.1)
        assert np.abs(h - h.conj().T).max() <= 1e-14

    @pytest.mark.parametrize("j", [0.0, 0.7, -0.5])
    def test_rejects_bad_j(self, j):
        with pytest.raises(ValueError):
            SpinRepresentation.from_j(j)


class TestIntegrateMu:
    def test_zero_field(self):
        mu = integrate_mu(ConstantField((0.0, 0.0, 0.0)), (0.0, 2.0), settings=TIGHT)
        assert np.abs(mu.mu3).max() == 0.0
        assert np.abs(mu.mu2).max() == 0.0
        assert np.abs(mu.mu1).max() == 0.0
        assert mu.n_restarts == 0

    def test_constant_b3(self):
        b3 = 1.7
        mu = integrate_mu(ConstantField((0.0, 0.0, b3)), (0.0, 3.0), settings=TIGHT)
        assert np.abs(mu.mu3).max() <= 1e-12
        assert np.abs(mu.mu2).max() <= 1e-12
        np.testing.assert_allclose(mu.mu1, -b3 * mu.times, atol=1e-10)

    def test_riccati_closed_form(self):
        # B = (B0, 0, 0): mu3 = -tan(B0 t / 2), Im mu1 = -2 ln cos(B0 t / 2)
        b0 = 1.4
        mu = integrate_mu(ConstantField((b0, 0.0, 0.0)), (0.0, 1.0), settings=TIGHT)
        half = 0.5 * b0 * mu.times
        np.testing.assert_allclose(mu.mu3, -np.tan(half), atol=1e-9)
        np.testing.assert_allclose(mu.mu1.imag, -2.0 * np.log(np.cos(half)), atol=1e-9)
        np.testing.assert_allclose(mu.mu1.real, 0.0, atol=1e-10)
        np.testing.assert_allclose(
            np.exp(mu.mu1.imag), 1.0 / np.cos(half) ** 2, rtol=1e-8
        )

    def test_restart_mechanics(self):
        # mu3 = -tan(B0 t / 2) hits the threshold 10 at t = 2 atan(10) / B0
        b0 = 2.4
        mu = integrate_mu(ConstantField((b0, 0.0, 0.0)), (0.0, 2.5), settings=TIGHT)
        assert mu.n_restarts >= 1
        t_cross = 2.0 * np.arctan(10.0) / b0
        assert mu.switches[0][0] == pytest.approx(t_cross, abs=1e-6)
        assert np.abs(mu.mu3).max() <= 10.0 + 1e-6
        # segment-local state restarts at zero
        seg = mu.segments[1]
        assert abs(complex(seg.interpolant(seg.t_start)[0])) <= 1e-12

    @pytest.mark.parametrize("seed", [0, 1, 4, 9, 16])
    def test_eq9_constraints_on_random_fields(self, seed):
        mu = integrate_mu(strong_field(seed), (0.0, 1.0), settings=TIGHT)
        pred = np.conjugate(mu.mu3) / (1.0 + np.abs(mu.mu3) ** 2)
        assert np.abs(mu.mu2 - pred).max() <= 1e-9
        rel = np.abs(np.exp(mu.mu1.imag) / (1.0 + np.abs(mu.mu3) ** 2) - 1.0)
        assert rel.max() <= 1e-8


class TestReconstructEvolution:
    def test_zero_mu_is_identity(self):
        mu = integrate_mu(ConstantField((0.0, 0.0, 0.0)), (0.0, 1.0), settings=TIGHT)
        np.testing.assert_allclose(reconstruct_evolution(mu, HALF, 1.0), np.eye(2), atol=1e-13)

    def test_constant_b3_diagonal(self):
        b3, t = 1.3, 2.0
        mu = integrate_mu(ConstantField((0.0, 0.0, b3)), (0.0, t), settings=TIGHT)
        u = reconstruct_evolution(mu, HALF, t)
        expected = np.diag([np.exp(1j * b3 * t / 2), np.exp(-1j * b3 * t / 2)])
        np.testing.assert_allclose(u, expected, atol=1e-10)
        h = HALF.hamiltonian(0.0, 0.0, b3)
        np.testing.assert_allclose(u, mat_exp(-1j * t * h), atol=1e-10)

    def test_pi_rotation_through_restart(self):
        b0 = 1.0
        mu = integrate_mu(ConstantField((b0, 0.0, 0.0)), (0.0, np.pi), settings=TIGHT)
        assert mu.n_restarts >= 1  # tan singularity at B0 t = pi sits past the threshold
        u = reconstruct_evolution(mu, HALF, np.pi)
        assert abs(u[0, 1]) == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(u, 1j * np.array([[0, 1], [1, 0]]), atol=1e-9)

    @pytest.mark.parametrize("seed", [2, 5, 8])
    def test_unitarity_on_random_fields(self, seed):
        mu = integrate_mu(strong_field(seed), (0.0, 1.0), settings=TIGHT, n_samples=101)
        us = reconstruct_evolution(mu, HALF, mu.times)
        worst = max(np.linalg.norm(u.conj().T @ u - np.eye(2), 2) for u in us)
        assert worst <= 1e-9

    @pytest.mark.parametrize("seed", [1, 3])
    def test_direct_oracle_including_restarts(self, seed):
        field = strong_field(seed)
        mu = integrate_mu(field, (0.0, 1.0), settings=TIGHT)
        assert mu.n_restarts >= 1
        u = reconstruct_evolution(mu, HALF, 1.0)
        u_ref = direct_propagate(field, HALF, (0.0, 1.0), 40000)
        assert np.linalg.norm(u - u_ref, 2) <= 1e-7

    def test_representation_independence_j1(self):
        field = gentle_field(11)
        rep1 = SpinRepresentation.from_j(1.0)
        mu = integrate_mu(field, (0.0, 1.0), settings=TIGHT)
        u = reconstruct_evolution(mu, rep1, 1.0)
        u_ref = direct_propagate(field, rep1, (0.0, 1.0), 20000)
        assert u.shape == (3, 3)
        assert np.linalg.norm(u - u_ref, 2) <= 1e-7

    def test_out_of_span_raises(self):
        mu = integrate_mu(ConstantField((0.0, 0.0, 1.0)), (0.0, 1.0), settings=TIGHT)
        with pytest.raises(ValueError):
            reconstruct_evolution(mu, HALF, 1.5)


class TestStateAndDensity:
    def test_identity_evolution(self):
        mu = integrate_mu(ConstantField((0.0, 0.0, 0.0)), (0.0, 1.0), settings=TIGHT)
        psi = evolve_state(mu, HALF, 1.0, psi0=np.array([0.6, 0.8]))
        np.testing.assert_allclose(psi, [0.6, 0.8], atol=1e-13)

    def test_rabi_probability(self):
        # B0 t = pi/2 gives mu3 = -1 and transfer probability 1/2
        b0 = 2.0
        t = np.pi / 2 / b0
        mu = integrate_mu(ConstantField((b0, 0.0, 0.0)), (0.0, t), settings=TIGHT)
        psi = evolve_state(mu, HALF, t)
        assert abs(psi[1]) ** 2 == pytest.approx(0.5, abs=1e-9)
        ts = np.linspace(0.0, t, 9)
        probs = np.abs(evolve_state(mu, HALF, ts)[:, 1]) ** 2
        np.testing.assert_allclose(probs, np.sin(0.5 * b0 * ts) ** 2, atol=1e-9)

    def test_density_matrix_mu3_form(self):
        b0 = 1.1
        t = 0.7
        mu = integrate_mu(ConstantField((b0, 0.0, 0.0)), (0.0, t), settings=TIGHT)
        rho = density_matrix(mu, t)
        m3 = complex(mu.mu_values(t)[0])
        n = 1.0 + abs(m3) ** 2
        expected = np.array([[1.0, 1j * m3], [-1j * np.conjugate(m3), abs(m3) ** 2]]) / n
        np.testing.assert_allclose(rho, expected, atol=1e-10)

    def test_density_matrix_projector(self):
        mu = integrate_mu(strong_field(4), (0.0, 1.0), settings=TIGHT)
        rho = density_matrix(mu, 0.9)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.abs(rho @ rho - rho).max() <= 1e-10
        assert np.abs(rho - rho.conj().T).max() <= 1e-12


class TestSplitU1U2:
    def test_trivial(self):
        mu = integrate_mu(ConstantField((0.0, 0.0, 0.0)), (0.0, 1.0), settings=TIGHT)
        u1, u2 = split_u1_u2(mu, 0.5)
        np.testing.assert_allclose(u1, np.eye(2), atol=1e-13)
        np.testing.assert_allclose(u2, np.eye(2), atol=1e-13)

    def test_hand_values_at_mu3_minus_one(self):
        # B0 t = pi/2: mu3 = -1, Re mu1 = 0, Im mu1 = ln 2
        b0 = 1.0
        t = np.pi / 2
        mu = integrate_mu(ConstantField((b0, 0.0, 0.0)), (0.0, t), settings=TIGHT)
        u1, u2 = split_u1_u2(mu, t)
        np.testing.assert_allclose(u1, [[0.5, 1j], [0.5j, 1.0]], atol=1e-9)
        np.testing.assert_allclose(
            u2, np.diag([np.sqrt(2.0), 1.0 / np.sqrt(2.0)]), atol=1e-9
        )

    @pytest.mark.parametrize("seed", [0, 7])
    def test_product_reproduces_evolution(self, seed):
        field = gentle_field(seed)
        mu = integrate_mu(field, (0.0, 1.0), settings=TIGHT)
        assert mu.n_restarts == 0
        for t in (0.3, 0.85):
            u1, u2 = split_u1_u2(mu, t)
            assert np.linalg.det(u1) == pytest.approx(1.0, abs=1e-10)
            np.testing.assert_allclose(
                u1 @ u2, reconstruct_evolution(mu, HALF, t), atol=1e-10
            )

    def test_product_across_restart_needs_switch_operator(self):
        b0 = 2.4
        mu = integrate_mu(ConstantField((b0, 0.0, 0.0)), (0.0, 2.5), settings=TIGHT)
        t = 2.4  # inside the second gauge segment
        assert mu.segment_index(t) == 1
        u1, u2 = split_u1_u2(mu, t)
        u_start = mu.switches[0][1]
        np.testing.assert_allclose(
            u1 @ u2 @ u_start, reconstruct_evolution(mu, HALF, t), atol=1e-10
        )

    def test_unitarized_variant(self):
        mu = integrate_mu(gentle_field(3), (0.0, 1.0), settings=TIGHT)
        t = 0.6
        u1, u2 = split_u1_u2(mu, t, unitarized=True)
        assert np.linalg.norm(u1.conj().T @ u1 - np.eye(2), 2) <= 1e-12
        np.testing.assert_allclose(
            u1 @ u2, reconstruct_evolution(mu, HALF, t), atol=1e-10
        )


class TestFrameMatrices:
    @given(
        re3=st.floats(-3.0, 3.0),
        im3=st.floats(-3.0, 3.0),
        bx=st.floats(-2.0, 2.0),
        by=st.floats(-2.0, 2.0),
        b3=st.floats(-2.0, 2.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_off_diagonal_cancellation_is_algebraic(self, re3, im3, bx, by, b3):
        # the connection's off-diagonals equal the frame Hamiltonian's exactly,
        # leaving a purely diagonal difference mu1'/2 sigma_z
        mu3 = complex(re3, im3)
        bp = complex(bx, by)
        h = u1_frame_hamiltonian(mu3, bp, bp.conjugate(), b3)
        c = u1_frame_connection(mu3, bp, bp.conjugate(), b3)
        diff = h - c
        assert abs(diff[0, 1]) <= 1e-12 * max(1.0, abs(h[0, 1]))
        assert abs(diff[1, 0]) <= 1e-12 * max(1.0, abs(h[1, 0]))
        mu1dot = -b3 - 1j * mu3 * bp
        assert diff[0, 0] == pytest.approx(mu1dot / 2.0, abs=1e-12)
        assert diff[1, 1] == pytest.approx(-mu1dot / 2.0, abs=1e-12)


class TestEffectiveHamiltonianTd:
    def test_constant_b3(self):
        b3 = 0.9
        mu = integrate_mu(ConstantField((0.0, 0.0, b3)), (0.0, 1.0), settings=TIGHT)
        chk = effective_hamiltonian_td(mu, t=0.5)
        np.testing.assert_allclose(chk.h_eff, np.diag([-b3 / 2, b3 / 2]), atol=1e-10)
        assert chk.max_off_diagonal <= 1e-7

    def test_zero_field(self):
        mu = integrate_mu(ConstantField((0.0, 0.0, 0.0)), (0.0, 1.0), settings=TIGHT)
        chk = effective_hamiltonian_td(mu, t=0.5)
        np.testing.assert_allclose(chk.h_eff, np.zeros((2, 2)), atol=1e-10)

    def test_transverse_drive_imaginary_diagonal(self):
        # at B0 t = pi/2, mu3 = -1 and mu1' = -i mu3 B0 = i B0
        b0 = 1.0
        mu = integrate_mu(ConstantField((b0, 0.0, 0.0)), (0.0, 2.0), settings=TIGHT)
        chk = effective_hamiltonian_td(mu, t=np.pi / 2, fd_step=1e-5)
        assert chk.h_eff[0, 0] == pytest.approx(0.5j * b0, abs=1e-8)
        assert chk.h_eff_numeric[0, 0] == pytest.approx(0.5j * b0, abs=1e-6)

    @pytest.mark.parametrize("seed", [3, 7])
    def test_cancellation_along_random_trajectories(self, seed):
        mu = integrate_mu(gentle_field(seed), (0.0, 1.0), settings=TIGHT)
        for t in np.linspace(0.05, 0.95, 20):
            chk = effective_hamiltonian_td(mu, t=float(t), fd_step=1e-5)
            assert chk.max_off_diagonal <= 1e-7
            assert chk.diagonal_error <= 1e-8


class TestPhaseSplit:
    def test_constant_b3(self):
        b3, t = 1.2, 2.0
        mu = integrate_mu(ConstantField((0.0, 0.0, b3)), (0.0, t), settings=TIGHT)
        ps = phase_split(mu)
        assert ps.total == pytest.approx(b3 * t / 2, abs=1e-10)
        assert ps.dynamical == pytest.approx(b3 * t / 2, abs=1e-10)
        assert ps.geometric == pytest.approx(0.0, abs=1e-10)

    def test_zero_field(self):
        mu = integrate_mu(ConstantField((0.0, 0.0, 0.0)), (0.0, 1.0), settings=TIGHT)
        ps = phase_split(mu)
        assert ps.total == 0.0 == ps.dynamical == ps.geometric

    @pytest.mark.parametrize("seed", [0, 6, 12])
    def test_additivity_on_random_fields(self, seed):
        mu = integrate_mu(strong_field(seed), (0.0, 1.0), settings=TIGHT)
        ps = phase_split(mu)
        assert ps.additivity_residual <= 1e-8
        # sampled series are consistent with the endpoint values
        assert ps.total_samples[-1] == pytest.approx(ps.total, abs=1e-10)

    def test_berry_limit_coarse(self):
        from effham.fields import RotatingConeField

        theta = np.pi / 3
        f = RotatingConeField(1.0, theta, 0.02)
        mu = integrate_mu(f, (0.0, f.period), settings=TIGHT, n_samples=401)
        ps = phase_split(mu)
        ref = np.pi * (1.0 - np.cos(theta))
        assert abs(abs(ps.geometric) - ref) / ref <= 0.04


class TestDirectPropagate:
    def test_constant_matches_mat_exp(self):
        field = ConstantField((0.4, -0.8, 1.1))
        h = HALF.hamiltonian(complex(0.4, -0.8), complex(0.4, 0.8), 1.1)
        u = direct_propagate(field, HALF, (0.0, 2.0), 700)
        np.testing.assert_allclose(u, mat_exp(-2j * h), atol=1e-12)

    def test_zero_field_identity(self):
        u = direct_propagate(ConstantField((0.0, 0.0, 0.0)), HALF, (0.0, 1.0), 9)
        np.testing.assert_allclose(u, np.eye(2), atol=1e-15)

    def test_second_order_convergence(self):
        field = strong_field(6)
        ref = direct_propagate(field, HALF, (0.0, 1.0), 65536)
        errs = [
            np.linalg.norm(direct_propagate(field, HALF, (0.0, 1.0), n) - ref, 2)
            for n in (512, 1024, 2048)
        ]
        ratios = [errs[i] / errs[i + 1] for i in range(2)]
        for r in ratios:
            assert 3.4 <= r <= 4.6

    def test_unitary_by_construction(self):
        u = direct_propagate(strong_field(9), HALF, (0.0, 1.0), 333)
        assert np.linalg.norm(u.conj().T @ u - np.eye(2), 2) <= 1e-12

    def test_return_samples_shape(self):
        times, us = direct_propagate(
            ConstantField((1.0, 0.0, 0.0)), HALF, (0.0, 1.0), 8, return_samples=True
        )
        assert times.shape == (9,) and us.shape == (9, 2, 2)
        np.testing.assert_allclose(us[0], np.eye(2), atol=1e-15)
