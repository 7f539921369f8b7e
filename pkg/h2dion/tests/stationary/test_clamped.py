import numpy as np
from django.test import SimpleTestCase

from h2dion.exceptions.simulation import GridException
from h2dion.stationary.clamped import FiniteDifferenceConfig, SpectralGridConfig, one_electron_ground_energy, \
    one_electron_relaxed_energy, relax_two_electron

SMALL_TWO_ELECTRON: SpectralGridConfig = SpectralGridConfig(n=64, z_max=10.0, time_step=0.05,
                                                            energy_threshold=1e-9, max_iterations=20000)


class TestOneElectron(SimpleTestCase):
    def test_two_independent_methods_agree(self):
        finite_difference: float = one_electron_ground_energy(1.4, 1.0)
        relaxed: float = one_electron_relaxed_energy(1.4, 1.0)
        self.assertAlmostEqual(finite_difference, relaxed, delta=1e-5)

    def test_energy_rises_with_softening(self):
        energies = [one_electron_ground_energy(2.0, beta) for beta in (0.5, 1.0, 2.0)]
        self.assertLess(energies[0], energies[1])
        self.assertLess(energies[1], energies[2])

    def test_small_softening_refines_spacing(self):
        config: FiniteDifferenceConfig = FiniteDifferenceConfig()
        self.assertAlmostEqual(config.spacing_for(1.0), 0.02)
        self.assertAlmostEqual(config.spacing_for(0.05), 0.005)

    def test_coarse_grid_raises(self):
        with self.assertRaises(GridException):
            one_electron_ground_energy(2.0, 1.0, FiniteDifferenceConfig(spacing=1.0, points_per_beta=0.5))

    def test_non_positive_softening_raises(self):
        with self.assertRaises(GridException):
            one_electron_ground_energy(2.0, 0.0)
        with self.assertRaises(GridException):
            one_electron_relaxed_energy(2.0, -1.0)


class TestTwoElectron(SimpleTestCase):
    def test_state_is_exchange_symmetric_and_normalized(self):
        _, state = relax_two_electron(1.4, 1.0, 1.0, SMALL_TWO_ELECTRON)
        np.testing.assert_allclose(state, state.T, atol=1e-14)
        self.assertAlmostEqual(float(np.sum(np.abs(state) ** 2)), 1.0, places=12)

    def test_energy_falls_as_repulsion_softens(self):
        strong, _ = relax_two_electron(1.4, 0.7, 1.0, SMALL_TWO_ELECTRON)
        weak, _ = relax_two_electron(1.4, 1.5, 1.0, SMALL_TWO_ELECTRON)
        self.assertGreater(strong, weak)

    def test_warm_start_reaches_same_energy(self):
        cold, state = relax_two_electron(1.4, 1.0, 1.0, SMALL_TWO_ELECTRON)
        warm, _ = relax_two_electron(1.4, 1.0, 1.0, SMALL_TWO_ELECTRON, state)
        self.assertAlmostEqual(cold, warm, delta=1e-7)

    def test_repulsion_raises_energy_above_independent_electrons(self):
        energy, _ = relax_two_electron(1.4, 1.0, 1.0, SMALL_TWO_ELECTRON)
        one_electron: float = one_electron_ground_energy(1.4, 1.0)
        self.assertGreater(energy, 2.0 * one_electron)

    def test_non_positive_parameters_raise(self):
        with self.assertRaises(GridException):
            relax_two_electron(1.4, 0.0, 1.0, SMALL_TWO_ELECTRON)
