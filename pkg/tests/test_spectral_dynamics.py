"""
Tests for diagonalization, the one-particle propagator and second-moment
evolution.
"""

import math

import numpy as np
import pytest

from src.models.analytic import HomogeneousDerived
from src.models.bipartite_model import HamiltonianMatrix, ModelParams
from src.models.spectral_dynamics import (
    GaussianDynamics,
    MomentMatrix,
    bose_occupation,
    diagonalize,
    split_decoupled_modes,
    evolve_moments,
    expectation,
    interaction_energy,
    moment_time_derivative,
    one_particle_unitary,
    subsystem_energy,
    thermal_initial_moments,
    total_energy,
    unitary_derivative
)
from src.utils.errors import PhysicsError
from tests.helpers import desk_params, hamiltonian_of


def _two_mode(omega1=1.0, omega2=0.3, gamma=0.01):
    return HamiltonianMatrix(h=np.array([[omega1, gamma], [gamma, omega2]]), n1=1, n2=1)


class TestDiagonalize:

    def test_diagonal_matrix(self):
        spec = diagonalize(HamiltonianMatrix(h=np.diag([1.0, 0.3]), n1=1, n2=1))
        np.testing.assert_allclose(spec.eigenvalues, [0.3, 1.0], rtol=1e-15)

    def test_two_mode_eigenvalues(self):
        spec = diagonalize(_two_mode())
        root = math.sqrt(0.49 + 4e-4)
        np.testing.assert_allclose(spec.eigenvalues, [(1.3 - root) / 2, (1.3 + root) / 2], rtol=1e-13)

    def test_homogeneous_spectrum_matches_closed_form(self, strong_params):
        spec = diagonalize(hamiltonian_of(strong_params))
        expected = HomogeneousDerived.from_params(strong_params).spectrum()
        np.testing.assert_allclose(spec.eigenvalues, expected, rtol=1e-10, atol=1e-12)

    def test_orthogonal_eigenvectors_and_reconstruction(self):
        h = hamiltonian_of(desk_params(sigma=0.1, seed=4))
        spec = diagonalize(h)
        np.testing.assert_allclose(spec.z.T @ spec.z, np.eye(h.dim), atol=1e-12)
        np.testing.assert_allclose(spec.reconstruct(), h.h, atol=1e-12)

    def test_degenerate_cluster_stays_orthogonal(self):
        # eps1 has multiplicity 39
        h = hamiltonian_of(desk_params(n1=40, g1=0.01))
        spec = diagonalize(h)
        np.testing.assert_allclose(spec.z.T @ spec.z, np.eye(h.dim), atol=1e-10)

    def test_ascending(self):
        spec = diagonalize(hamiltonian_of(desk_params(sigma=0.2, seed=9)))
        assert np.all(np.diff(spec.eigenvalues) >= 0)


class TestUnitary:

    def test_identity_at_zero(self, strong_params):
        spec = diagonalize(hamiltonian_of(strong_params))
        np.testing.assert_allclose(one_particle_unitary(spec, 0.0), np.eye(spec.dim), atol=1e-14)

    @pytest.mark.parametrize("t", [0.7, 13.0, 1e4])
    def test_unitary(self, strong_params, t):
        spec = diagonalize(hamiltonian_of(strong_params))
        u = one_particle_unitary(spec, t)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(spec.dim), atol=1e-10)

    def test_diagonal_hamiltonian_gives_phases(self):
        spec = diagonalize(HamiltonianMatrix(h=np.diag([1.0, 0.3]), n1=1, n2=1))
        u = one_particle_unitary(spec, 2.5)
        np.testing.assert_allclose(u, np.diag(np.exp(-1j * np.array([1.0, 0.3]) * 2.5)), atol=1e-15)

    def test_first_derivative_is_minus_i_h_u(self, strong_params):
        h = hamiltonian_of(strong_params)
        spec = diagonalize(h)
        u = unitary_derivative(spec, 1.3)
        u_dot = unitary_derivative(spec, 1.3, order=1)
        np.testing.assert_allclose(u_dot, -1j * h.h @ u, atol=1e-12)


class TestThermalMoments:

    def test_single_modes(self):
        params = ModelParams(n1=1, n2=1, omega1=1.0, omega2=0.3, g1=0.0, g2=0.0,
                             gamma=0.01, temp1=0.6, temp2=4.0)
        s0 = thermal_initial_moments(params, _two_mode())
        n1 = 1.0 / math.expm1(1.0 / 0.6)
        n2 = 1.0 / math.expm1(0.3 / 4.0)
        np.testing.assert_allclose(s0.s, np.diag([n1, n2]), rtol=1e-14)
        assert n1 == pytest.approx(0.23286, rel=1e-4)

    def test_zero_temperature_limit(self):
        params = ModelParams(n1=1, n2=1, omega1=1.0, omega2=0.3, g1=0.0, g2=0.0,
                             gamma=0.01, temp1=1e-3, temp2=1e-3)
        s0 = thermal_initial_moments(params, _two_mode())
        np.testing.assert_allclose(s0.s, np.zeros((2, 2)), atol=1e-100)

    def test_homogeneous_block(self):
        params = desk_params(n1=2, g1=0.1)
        s0 = thermal_initial_moments(params, hamiltonian_of(params))
        n_eps = bose_occupation(0.9, 0.6)
        n_nu = bose_occupation(1.1, 0.6)
        j = np.full((2, 2), 0.5)
        expected = n_eps * (np.eye(2) - j) + n_nu * j
        np.testing.assert_allclose(s0.s[:2, :2].real, expected, rtol=1e-12)
        np.testing.assert_array_equal(s0.s[:2, 2:], 0.0)

    def test_non_positive_mode_energy(self):
        params = desk_params(n1=2, omega1=0.05, g1=0.1)
        with pytest.raises(PhysicsError, match="non-positive"):
            thermal_initial_moments(params, hamiltonian_of(params))

    def test_bose_occupation_rejects_zero(self):
        with pytest.raises(PhysicsError):
            bose_occupation(0.0, 1.0)


class TestEvolution:

    def test_no_change_at_zero(self, strong_params):
        dynamics = GaussianDynamics.from_params(strong_params, hamiltonian_of(strong_params))
        np.testing.assert_allclose(dynamics.moments(0.0).s, dynamics.s0.s, atol=1e-12)

    def test_matches_direct_conjugation(self, strong_params):
        h = hamiltonian_of(strong_params)
        dynamics = GaussianDynamics.from_params(strong_params, h)
        u = one_particle_unitary(dynamics.spectrum, 4.2)
        direct = evolve_moments(dynamics.s0, u, t=4.2)
        np.testing.assert_allclose(dynamics.moments(4.2).s, direct.s, atol=1e-12)

    def test_decoupled_blocks_stationary(self):
        params = desk_params(gamma=0.0, g1=0.02)
        dynamics = GaussianDynamics.from_params(params, hamiltonian_of(params))
        for t in (1.0, 17.0):
            np.testing.assert_allclose(dynamics.moments(t).s, dynamics.s0.s, atol=1e-12)

    @pytest.mark.parametrize("t", [0.0, 2.3, 40.0])
    def test_hermitian_and_positive(self, t):
        params = desk_params(sigma=0.1, seed=2)
        dynamics = GaussianDynamics.from_params(params, hamiltonian_of(params))
        s = dynamics.moments(t)
        assert s.hermiticity_error() < 1e-12
        assert s.min_eigenvalue() > -1e-10

    def test_energy_and_trace_conserved(self):
        params = desk_params(sigma=0.1, seed=6, gamma=0.08)
        h = hamiltonian_of(params)
        dynamics = GaussianDynamics.from_params(params, h)
        e0 = total_energy(dynamics.s0, h)
        n0 = dynamics.s0.trace
        for t in (0.5, 9.0, 300.0):
            s = dynamics.moments(t)
            assert abs(total_energy(s, h) - e0) <= 1e-9 * abs(e0)
            assert abs(s.trace - n0) <= 1e-9 * n0

    def test_rate_at_zero_vanishes_for_decoupled_thermal_state(self):
        params = desk_params(gamma=0.0)
        dynamics = GaussianDynamics.from_params(params, hamiltonian_of(params))
        np.testing.assert_allclose(dynamics.moments_rate(0.0), 0.0, atol=1e-12)

    def test_rate_matches_central_difference(self, strong_params):
        dynamics = GaussianDynamics.from_params(strong_params, hamiltonian_of(strong_params))
        t, step = 2.9, 1e-4
        numeric = (dynamics.moments(t + step).s - dynamics.moments(t - step).s) / (2 * step)
        exact = dynamics.moments_rate(t)
        assert np.linalg.norm(exact - numeric) <= 1e-6 * np.linalg.norm(exact)

    def test_rate_agrees_with_propagator_form(self, strong_params):
        dynamics = GaussianDynamics.from_params(strong_params, hamiltonian_of(strong_params))
        direct = moment_time_derivative(dynamics.s0, dynamics.spectrum, 2.1)
        np.testing.assert_allclose(dynamics.moments_rate(2.1), direct, atol=1e-12)

    def test_rate_is_traceless(self, strong_params):
        dynamics = GaussianDynamics.from_params(strong_params, hamiltonian_of(strong_params))
        assert abs(np.trace(dynamics.moments_rate(5.0))) < 1e-12


class TestEnergies:

    def test_initial_subsystem_energy(self, strong_params):
        h = hamiltonian_of(strong_params)
        s0 = thermal_initial_moments(strong_params, h)
        d = HomogeneousDerived.from_params(strong_params)
        for x in (1, 2):
            assert subsystem_energy(s0, h, x) == pytest.approx(d.initial_energy(x), rel=1e-12)

    def test_no_initial_interaction_energy(self, strong_params):
        h = hamiltonian_of(strong_params)
        s0 = thermal_initial_moments(strong_params, h)
        assert interaction_energy(s0, h) == 0.0

    def test_total_is_sum_of_parts(self, strong_params):
        h = hamiltonian_of(strong_params)
        dynamics = GaussianDynamics.from_params(strong_params, h)
        s = dynamics.moments(6.0)
        parts = subsystem_energy(s, h, 1) + subsystem_energy(s, h, 2) + interaction_energy(s, h)
        assert total_energy(s, h) == pytest.approx(parts, rel=1e-12)

    def test_identical_subsystems_stay_put(self, identical_params):
        h = hamiltonian_of(identical_params)
        dynamics = GaussianDynamics.from_params(identical_params, h)
        e1 = subsystem_energy(dynamics.s0, h, 1)
        for t in (1.0, 7.5, 30.0):
            assert subsystem_energy(dynamics.moments(t), h, 1) == pytest.approx(e1, abs=1e-12)

    def test_resonant_collective_modes_have_no_interaction_energy(self):
        params = desk_params(n2=4, omega2=1.0, g2=1e-3, temp2=1.5)
        h = hamiltonian_of(params)
        dynamics = GaussianDynamics.from_params(params, h)
        for t in (2.0, 11.0):
            assert abs(interaction_energy(dynamics.moments(t), h)) < 1e-12

    def test_non_hermitian_operator_rejected(self):
        with pytest.raises(PhysicsError, match="imaginary"):
            expectation(np.array([[0.0, 1j], [0.0, 0.0]]), np.ones((2, 2)))

    def test_moment_matrix_block(self, strong_params):
        h = hamiltonian_of(strong_params)
        s = MomentMatrix(s=np.arange(100.0).reshape(10, 10))
        np.testing.assert_array_equal(s.block(h, 2), s.s[4:, 4:])


class TestMomentValidation:

    def test_thermal_state_is_valid(self, strong_params):
        s0 = thermal_initial_moments(strong_params, hamiltonian_of(strong_params))
        assert s0.validate() is s0

    def test_rejects_non_hermitian(self):
        s = MomentMatrix(s=np.array([[0.5, 0.1], [0.0, 0.2]], dtype=complex))
        with pytest.raises(PhysicsError, match="Hermitian"):
            s.validate()

    def test_rejects_negative_occupation(self):
        s = MomentMatrix(s=np.diag([0.5, -1e-3]).astype(complex))
        with pytest.raises(PhysicsError, match="semidefinite"):
            s.validate()

    def test_dynamics_checks_initial_state(self, strong_params):
        h = hamiltonian_of(strong_params)
        bad = MomentMatrix(s=-np.eye(h.dim, dtype=complex))
        with pytest.raises(PhysicsError):
            GaussianDynamics(h, diagonalize(h), bad)


class TestDecoupledModes:

    def test_homogeneous_blocks_keep_one_collective_pair(self, strong_params):
        h = hamiltonian_of(strong_params)
        modes = split_decoupled_modes(h)
        assert (modes.h.n1, modes.h.n2) == (1, 1)
        assert modes.n_frozen == h.dim - 2
        d = HomogeneousDerived.from_params(strong_params)
        np.testing.assert_allclose(np.diag(modes.h.h), [d.nu1, d.nu2], rtol=1e-12)
        np.testing.assert_allclose(np.abs(modes.h.coupling), [[d.big_gamma / 2]], rtol=1e-12)
        np.testing.assert_allclose(modes.frozen[1], strong_params.omega1 - strong_params.g1, rtol=1e-12)
        np.testing.assert_allclose(modes.frozen[2], strong_params.omega2 - strong_params.g2, rtol=1e-12)

    def test_spectrum_is_preserved(self, strong_params):
        h = hamiltonian_of(strong_params)
        modes = split_decoupled_modes(h)
        combined = np.sort(np.concatenate(
            [diagonalize(modes.h).eigenvalues, modes.frozen[1], modes.frozen[2]]
        ))
        np.testing.assert_allclose(combined, diagonalize(h).eigenvalues, rtol=1e-12, atol=1e-12)

    def test_distributed_frequencies_keep_every_mode(self):
        h = hamiltonian_of(desk_params(sigma=0.1, seed=3))
        modes = split_decoupled_modes(h)
        assert (modes.h.n1, modes.h.n2) == (h.n1, h.n2)
        assert modes.n_frozen == 0

    def test_uncoupled_blocks_keep_every_mode(self):
        h = hamiltonian_of(desk_params(gamma=0.0))
        modes = split_decoupled_modes(h)
        assert modes.h.dim == h.dim

    def test_subsystem_energies_match_full_evolution(self, strong_params):
        h = hamiltonian_of(strong_params)
        full = GaussianDynamics.from_params(strong_params, h)
        modes = split_decoupled_modes(h)
        reduced = GaussianDynamics.from_params(strong_params, modes.h)
        for which in (1, 2):
            frozen = modes.frozen[which]
            offset = np.sum(frozen * bose_occupation(frozen, strong_params.temperature(which)))
            for t in (0.0, 3.1, 27.0):
                s_block, _ = reduced.block_moments(t, which)
                value = offset + expectation(modes.h.block(which), s_block)
                assert value == pytest.approx(subsystem_energy(full.moments(t), h, which), rel=1e-12)


class TestBlockMoments:

    @pytest.mark.parametrize("t", [0.0, 1.7, 33.0])
    def test_blocks_of_full_moments(self, t):
        params = desk_params(sigma=0.1, seed=5)
        h = hamiltonian_of(params)
        dynamics = GaussianDynamics.from_params(params, h)
        s = dynamics.moments(t)
        rate = dynamics.moments_rate(t)
        for which in (1, 2):
            sl = h.block_slice(which)
            s_block, rate_block = dynamics.block_moments(t, which, with_rate=True)
            np.testing.assert_allclose(s_block, s.s[sl, sl], atol=1e-12)
            np.testing.assert_allclose(rate_block, rate[sl, sl], atol=1e-12)

    def test_rate_omitted_by_default(self, strong_params):
        dynamics = GaussianDynamics.from_params(strong_params, hamiltonian_of(strong_params))
        _, rate = dynamics.block_moments(2.0, 1)
        assert rate is None

    @pytest.mark.parametrize("t", [0.0, 4.4, 19.0])
    def test_interaction_energy_from_normal_modes(self, t):
        params = desk_params(sigma=0.1, seed=8, gamma=0.08)
        h = hamiltonian_of(params)
        dynamics = GaussianDynamics.from_params(params, h)
        expected = interaction_energy(dynamics.moments(t), h)
        assert dynamics.interaction_energy(t) == pytest.approx(expected, rel=1e-11, abs=1e-12)
