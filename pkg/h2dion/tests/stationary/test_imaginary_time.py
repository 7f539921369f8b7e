import numpy as np
from django.test import SimpleTestCase

from h2dion.exceptions.simulation import RelaxationException
from h2dion.numerics.grid import MomentumGrid, coordinate_axis
from h2dion.stationary.imaginary_time import MONOTONICITY_TOLERANCE, ImaginaryTimeRelaxer, RelaxationResult, \
    energy_variance, exchange_symmetric, expected_energy

N: int = 128
Z_MAX: float = 10.0
SPACING: float = 2.0 * Z_MAX / N
X: np.ndarray = coordinate_axis(N, -Z_MAX, SPACING)
KINETIC: np.ndarray = 0.5 * MomentumGrid.for_axis(N, SPACING).k ** 2
HARMONIC: np.ndarray = 0.5 * X ** 2


def harmonic_relaxer(**overrides) -> ImaginaryTimeRelaxer:
    options = dict(kinetic=KINETIC, potential=HARMONIC, time_step=0.01, energy_threshold=1e-12,
                   max_iterations=100000, energy_interval=10)
    options.update(overrides)
    return ImaginaryTimeRelaxer(**options)


class TestImaginaryTimeRelaxer(SimpleTestCase):
    def test_harmonic_oscillator_ground_energy(self):
        initial: np.ndarray = np.exp(-((X - 1.0) ** 2)).astype(np.complex128)
        result: RelaxationResult = harmonic_relaxer().relax(initial)
        self.assertAlmostEqual(result.energy, 0.5, places=6)
        self.assertAlmostEqual(float(np.sum(np.abs(result.amplitudes) ** 2)), 1.0, places=12)

    def test_energy_history_falls_to_the_limit(self):
        initial: np.ndarray = np.exp(-0.1 * (X - 2.0) ** 2).astype(np.complex128)
        result: RelaxationResult = harmonic_relaxer().relax(initial)
        self.assertGreater(result.energies[0], result.energies[-1])
        self.assertEqual(result.energies[-1], result.energy)
        self.assertLess(abs(result.energies[-1] - result.energies[-2]), 1e-12)

    def test_energy_never_rises_between_checks(self):
        initial: np.ndarray = np.exp(-0.1 * (X - 2.0) ** 2).astype(np.complex128)
        result: RelaxationResult = harmonic_relaxer(time_step=0.002).relax(initial)
        self.assertGreater(len(result.energies), 10)
        self.assertLessEqual(float(np.max(np.diff(result.energies))), MONOTONICITY_TOLERANCE)

    def test_ground_state_has_vanishing_variance(self):
        result: RelaxationResult = harmonic_relaxer().relax(np.exp(-0.3 * X ** 2))
        self.assertLess(energy_variance(result.amplitudes, KINETIC, HARMONIC), 1e-6)

    def test_zero_initial_state_raises(self):
        with self.assertRaises(RelaxationException):
            harmonic_relaxer().relax(np.zeros(N))

    def test_iteration_budget_raises(self):
        with self.assertRaises(RelaxationException):
            harmonic_relaxer(max_iterations=20).relax(np.exp(-0.1 * (X - 2.0) ** 2))

    def test_invalid_parameters_rejected(self):
        with self.assertRaises(RelaxationException):
            harmonic_relaxer(time_step=0.0)
        with self.assertRaises(RelaxationException):
            harmonic_relaxer(energy_threshold=-1.0)

    def test_expected_energy_ignores_normalization(self):
        state: np.ndarray = np.exp(-0.5 * X ** 2).astype(np.complex128)
        self.assertAlmostEqual(expected_energy(3.0 * state, KINETIC, HARMONIC),
                               expected_energy(state, KINETIC, HARMONIC))

    def test_exchange_symmetric(self):
        values: np.ndarray = np.arange(2 * 9, dtype=float).reshape(2, 3, 3)
        symmetric: np.ndarray = exchange_symmetric(values)
        np.testing.assert_allclose(symmetric, np.swapaxes(symmetric, 1, 2))
        np.testing.assert_allclose(np.diagonal(symmetric, axis1=1, axis2=2), np.diagonal(values, axis1=1, axis2=2))
