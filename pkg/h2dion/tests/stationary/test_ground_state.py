import numpy as np
from django.test import SimpleTestCase

from h2dion.exceptions.simulation import ConfigurationException
from h2dion.numerics.grid import GridSpec
from h2dion.numerics.wavepacket import WavePacket, exchange_defect, norm
from h2dion.potentials.hamiltonian import ModelHamiltonian
from h2dion.potentials.softcore_table import SoftCoreTable
from h2dion.stationary.ground_state import RelaxationConfig, energy_expectation, hamiltonian_variance, \
    initial_guess, relax_ground_state

GRID: GridSpec = GridSpec(n_r=16, n_z1=32, n_z2=32, r_min=0.6, r_max=3.0, z_max=12.0)
TABLE: SoftCoreTable = SoftCoreTable.constant(alpha=1.0, beta=1.0)


class TestRelaxationConfig(SimpleTestCase):
    def test_invalid_values_rejected(self):
        with self.assertRaises(ConfigurationException):
            RelaxationConfig(time_step=0.0)
        with self.assertRaises(ConfigurationException):
            RelaxationConfig(energy_threshold=0.0)
        with self.assertRaises(ConfigurationException):
            RelaxationConfig(symmetrize_every=0)

    def test_initial_guess_is_normalized_and_symmetric(self):
        guess: WavePacket = initial_guess(GRID)
        self.assertAlmostEqual(norm(guess), 1.0, places=12)
        self.assertLess(exchange_defect(guess), 1e-14)


class TestRelaxGroundState(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.hamiltonian = ModelHamiltonian(GRID, TABLE)
        cls.config = RelaxationConfig(time_step=0.05, energy_threshold=1e-7, max_iterations=50000)
        cls.ground = relax_ground_state(GRID, TABLE, cls.config, hamiltonian=cls.hamiltonian)

    def test_normalized_and_exchange_symmetric(self):
        self.assertAlmostEqual(norm(self.ground), 1.0, places=10)
        self.assertLess(exchange_defect(self.ground), 1e-12)

    def test_energy_below_initial_guess(self):
        self.assertLess(energy_expectation(self.ground, self.hamiltonian),
                        energy_expectation(initial_guess(GRID, self.config), self.hamiltonian))

    def test_bound_state(self):
        # below the two-proton Coulomb energy at the largest R on the grid
        self.assertLess(energy_expectation(self.ground, self.hamiltonian), 1.0 / GRID.r_max)

    def test_nearly_an_eigenstate(self):
        guess: WavePacket = initial_guess(GRID, self.config)
        self.assertLess(hamiltonian_variance(self.ground, self.hamiltonian),
                        0.1 * hamiltonian_variance(guess, self.hamiltonian))

    def test_warm_start_from_result(self):
        again: WavePacket = relax_ground_state(GRID, TABLE, self.config, initial=self.ground.copy(),
                                               hamiltonian=self.hamiltonian)
        self.assertAlmostEqual(energy_expectation(again, self.hamiltonian),
                               energy_expectation(self.ground, self.hamiltonian), delta=1e-5)
        overlap: float = abs(np.vdot(again.amplitudes, self.ground.amplitudes)) * GRID.volume_element
        self.assertGreater(overlap, 0.99)
