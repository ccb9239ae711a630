"""Tests for the two-site DMRG ground-state search."""

import numpy as np
import pytest

from conftest import random_instance
from qwa_sim.dmrg import DmrgSettings, solve_ground
from qwa_sim.errors import DimensionError, InvalidInputError
from qwa_sim.exact import exact_ground
from qwa_sim.instance import GraphInstance, generate_instance
from qwa_sim.mpo import build_hamiltonian, expectation
from qwa_sim.mps import Mps, overlap, polarized_state, product_plus_x, random_product_state, readout_z
from qwa_sim.ordering import identity_path

TIGHT = DmrgSettings(epsilon=1e-12, energy_tol=1e-12)


class TestDmrgSettings:
    @pytest.mark.parametrize("kwargs", [{"m_max": 1}, {"epsilon": 0.0}, {"max_sweeps": 0}, {"eig_tol": -1.0}])
    def test_invalid_settings(self, kwargs):
        with pytest.raises(InvalidInputError):
            DmrgSettings(**kwargs)


class TestSolveGround:
    def test_field_only_hamiltonian(self, rng):
        inst = generate_instance("chain", {"n": 6}, "gaussian", seed=0)
        h = build_hamiltonian(inst, identity_path(6), 0.0)
        result = solve_ground(random_product_state(6, rng), h)
        assert result.energy == pytest.approx(-3.0, abs=1e-10)
        assert overlap(result.psi, product_plus_x(6)) >= 1 - 1e-10
        assert result.converged

    def test_ferro_chain_matches_dense_oracle(self, ferro_chain_4):
        path = identity_path(4)
        result = solve_ground(product_plus_x(4), build_hamiltonian(ferro_chain_4, path, 0.5))
        _, exact = exact_ground(ferro_chain_4, path, 0.5)
        assert result.energy == pytest.approx(exact, abs=1e-8)

    def test_classical_point_reads_aligned_configuration(self, ferro_chain_4):
        h = build_hamiltonian(ferro_chain_4, identity_path(4), 1.0)
        result = solve_ground(polarized_state(4, 0.1), h)
        config = readout_z(result.psi)
        assert len(set(config.values)) == 1, f"Expected an aligned configuration, got {config.values}"
        assert result.energy == pytest.approx(-0.75, abs=1e-10)

    def test_energy_is_expectation_of_returned_state(self, gaussian_chain_8):
        h = build_hamiltonian(gaussian_chain_8, identity_path(8), 0.6)
        result = solve_ground(product_plus_x(8), h)
        assert result.energy == pytest.approx(expectation(h, result.psi), abs=1e-12)
        assert result.psi.norm() == pytest.approx(1.0, abs=1e-10)

    def test_single_site(self):
        single = build_hamiltonian(GraphInstance.from_edges(1, []), identity_path(1), 0.3)
        result = solve_ground(product_plus_x(1), single)
        assert result.energy == pytest.approx(-(1 - 0.3) / 2)

    def test_length_mismatch(self, ferro_chain_4):
        with pytest.raises(DimensionError):
            solve_ground(product_plus_x(3), build_hamiltonian(ferro_chain_4, identity_path(4), 0.5))

    def test_seeded_from_exact_state_converges_fast(self, ferro_chain_4):
        path = identity_path(4)
        for s in (0.2, 0.5, 0.9):
            vector, _ = exact_ground(ferro_chain_4, path, s)
            seed = Mps.from_statevector(vector.amplitudes)
            result = solve_ground(seed, build_hamiltonian(ferro_chain_4, path, s))
            assert result.sweeps_used <= 2, f"s={s}: {result.sweeps_used} sweeps from the exact seed"

    def test_cap_saturation_flagged(self):
        inst = generate_instance("chain", {"n": 10}, "gaussian", seed=4)
        cfg = DmrgSettings(epsilon=1e-14, m_max=2, max_sweeps=4)
        result = solve_ground(product_plus_x(10), build_hamiltonian(inst, identity_path(10), 0.5), cfg)
        assert result.cap_saturated
        assert result.max_bond_dim <= 2

    def test_adaptive_bond_dimension(self, gaussian_chain_8):
        """Every bond either meets the tolerance or the cap is flagged."""
        cfg = DmrgSettings(epsilon=1e-6)
        result = solve_ground(product_plus_x(8), build_hamiltonian(gaussian_chain_8, identity_path(8), 0.5), cfg)
        assert result.cap_saturated or result.max_discarded < cfg.epsilon
        assert result.max_bond_dim <= cfg.m_max


class TestVariationalSuite:
    """Upper bound and per-sweep monotonicity over randomized small instances."""

    @pytest.mark.parametrize("case", range(50))
    def test_variational_and_monotone(self, case):
        rng = np.random.default_rng(1000 + case)
        n = int(rng.integers(3, 9))
        inst = random_instance(rng, n, density=float(rng.uniform(0.0, 0.6)))
        s = float(rng.uniform(0.05, 0.95))
        path = identity_path(n)
        h = build_hamiltonian(inst, path, s)
        result = solve_ground(random_product_state(n, rng), h, TIGHT)
        _, exact = exact_ground(inst, path, s)

        assert result.energy >= exact - 1e-9, "DMRG energy below the exact ground energy"
        assert result.energy == pytest.approx(exact, abs=1e-6)
        steps = np.diff(result.sweep_energies)
        assert np.all(steps <= 1e-9), f"Sweep energies increased: {result.sweep_energies}"

