import astropy.units as u
import numpy as np
from django.test import SimpleTestCase

from h2dion.exceptions.simulation import ConfigurationException
from h2dion.tof.calibration import TofCalibration, energy_to_tof, estimate_t0, tof_to_energy

CALIBRATION: TofCalibration = TofCalibration(t0_ns=300.0, field_v_cm=25.0, delay_offset_ns=1000.0)


class TestTofCalibration(SimpleTestCase):
    def test_momentum_per_nanosecond(self):
        self.assertAlmostEqual(CALIBRATION.momentum_per_ns.to_value(u.kg * u.m / u.s), 4.005e-25, delta=1e-28)

    def test_3_8_ev_protons_at_25_v_cm(self):
        self.assertAlmostEqual(300.0 - energy_to_tof(3.8, CALIBRATION, forward=True), 112.7, delta=0.05)
        self.assertAlmostEqual(energy_to_tof(3.8, CALIBRATION, forward=False) - 300.0, 112.7, delta=0.05)

    def test_round_trip(self):
        energies: np.ndarray = np.array([0.0, 0.5, 3.8, 12.0])
        for forward in (True, False):
            times: np.ndarray = energy_to_tof(energies, CALIBRATION, forward=forward)
            np.testing.assert_allclose(tof_to_energy(times, CALIBRATION, forward=forward), energies,
                                       rtol=1e-10, atol=1e-12)

    def test_wrong_branch_is_nan(self):
        self.assertTrue(np.isnan(tof_to_energy(250.0, CALIBRATION, forward=False)))
        self.assertTrue(np.isnan(tof_to_energy(350.0, CALIBRATION, forward=True)))
        self.assertAlmostEqual(tof_to_energy(250.0, CALIBRATION), tof_to_energy(350.0, CALIBRATION), places=12)

    def test_delay_offset_does_not_enter_the_energy(self):
        shifted: TofCalibration = TofCalibration(t0_ns=300.0, field_v_cm=25.0, delay_offset_ns=0.0)
        self.assertEqual(tof_to_energy(200.0, CALIBRATION), tof_to_energy(200.0, shifted))
        self.assertEqual(CALIBRATION.absolute_time(200.0), 1200.0)

    def test_invalid_input(self):
        with self.assertRaises(ConfigurationException):
            TofCalibration(t0_ns=300.0, field_v_cm=0.0)
        with self.assertRaises(ConfigurationException):
            energy_to_tof(-1.0, CALIBRATION)


class TestEstimateT0(SimpleTestCase):
    def setUp(self):
        self.t_ns = np.arange(600, dtype=float)

    def test_symmetric_peaks(self):
        trace: np.ndarray = np.zeros(600)
        trace[187] = trace[413] = 0.5
        trace[250] = trace[350] = 0.2
        self.assertAlmostEqual(estimate_t0(trace, self.t_ns), 300.0, delta=0.5)

    def test_window(self):
        trace: np.ndarray = np.zeros(600)
        trace[187] = trace[413] = 0.5
        trace[20] = 5.0
        self.assertAlmostEqual(estimate_t0(trace, self.t_ns, window_ns=(100.0, 500.0)), 300.0, delta=0.5)

    def test_empty_trace_rejected(self):
        with self.assertRaises(ConfigurationException):
            estimate_t0(np.zeros(600), self.t_ns)
        with self.assertRaises(ConfigurationException):
            estimate_t0(np.ones(600), self.t_ns, window_ns=(700.0, 800.0))
