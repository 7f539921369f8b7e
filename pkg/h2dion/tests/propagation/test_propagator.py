import numpy as np
from django.test import SimpleTestCase

from h2dion.analysis.regions import Region, RegionSpec
from h2dion.exceptions.simulation import ConfigurationException, GridException, NaNDetectedException
from h2dion.laser.pulse import PulseParams
from h2dion.numerics.grid import GridSpec
from h2dion.numerics.wavepacket import WavePacket, exchange_defect, norm, normalize
from h2dion.potentials.hamiltonian import ModelHamiltonian
from h2dion.potentials.softcore_table import SoftCoreTable
from h2dion.propagation.absorber import AbsorberMask, apply_absorber, build_absorber_mask
from h2dion.propagation.propagator import PropagationResult, PropagatorConfig, SplitOperatorPropagator, \
    propagate, step

GRID: GridSpec = GridSpec(n_r=8, n_z1=32, n_z2=32, r_min=0.6, r_max=3.0, z_max=16.0)
TABLE: SoftCoreTable = SoftCoreTable.constant(alpha=1.0, beta=1.0)
PULSE: PulseParams = PulseParams(intensity=4e14, duration_fs=0.2)


def bound_packet() -> WavePacket:
    wp: WavePacket = WavePacket.zeros(GRID)
    r, z1, z2 = wp.axes.r, wp.axes.z1, wp.axes.z2
    wp.amplitudes = (np.exp(-((r - 1.5) / 0.3) ** 2)[:, None, None]
                     * np.exp(-0.5 * z1 ** 2)[None, :, None]
                     * np.exp(-0.5 * z2 ** 2)[None, None, :]).astype(np.complex128)
    return normalize(wp)


class TestPropagatorConfig(SimpleTestCase):
    def test_invalid_values_rejected(self):
        with self.assertRaises(ConfigurationException):
            PropagatorConfig(time_step_as=0.0)
        with self.assertRaises(ConfigurationException):
            PropagatorConfig(analysis_interval=0)
        with self.assertRaises(ConfigurationException):
            PropagatorConfig(tail_threshold=0.0)
        with self.assertRaises(ConfigurationException):
            PropagatorConfig(checkpoint_interval=-1)

    def test_absorber_must_fit_the_grid(self):
        with self.assertRaises(ConfigurationException):
            PropagatorConfig(absorber_z_width=16.0).check_grid(GRID)

    def test_nuclear_absorber_must_fit_half_the_r_axis(self):
        # R extent 2.4, half-length 1.2
        PropagatorConfig(absorber_r_width=1.1).check_grid(GRID)
        with self.assertRaises(ConfigurationException):
            PropagatorConfig(absorber_r_width=1.5).check_grid(GRID)

    def test_tail_cap(self):
        config: PropagatorConfig = PropagatorConfig(tail_duration_factor=2.0, tail_extra_au=500.0)
        self.assertAlmostEqual(config.tail_cap(PULSE), 2.0 * PULSE.duration + 500.0, places=10)


class TestSplitOperatorPropagator(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.hamiltonian = ModelHamiltonian(GRID, TABLE)

    def test_zero_step_rejected(self):
        with self.assertRaises(ConfigurationException):
            SplitOperatorPropagator(self.hamiltonian, 0.0)

    def test_unitary_without_absorber(self):
        propagator: SplitOperatorPropagator = SplitOperatorPropagator(self.hamiltonian, 0.05)
        wp: WavePacket = bound_packet()
        for index in range(100):
            propagator.step(wp, index * 0.05, PULSE)
        self.assertAlmostEqual(norm(wp), 1.0, places=10)

    def test_exchange_symmetry_is_kept(self):
        propagator: SplitOperatorPropagator = SplitOperatorPropagator(self.hamiltonian, 0.05)
        wp: WavePacket = bound_packet()
        for index in range(50):
            propagator.step(wp, index * 0.05, PULSE)
        self.assertLess(exchange_defect(wp), 1e-10)

    def test_backward_steps_undo_forward_steps(self):
        dt: float = 0.05
        forward: SplitOperatorPropagator = SplitOperatorPropagator(self.hamiltonian, dt)
        backward: SplitOperatorPropagator = SplitOperatorPropagator(self.hamiltonian, -dt)
        wp: WavePacket = bound_packet()
        original: np.ndarray = wp.amplitudes.copy()

        for index in range(40):
            forward.step(wp, index * dt, PULSE)
        for index in range(40, 0, -1):
            backward.step(wp, index * dt, PULSE)

        np.testing.assert_allclose(wp.amplitudes, original, atol=1e-9)

    def test_field_free_step_matches_step_function(self):
        propagator: SplitOperatorPropagator = SplitOperatorPropagator(self.hamiltonian, 0.05)
        first: WavePacket = propagator.step(bound_packet(), 0.0)
        second: WavePacket = step(bound_packet(), 0.0, 0.05, None, TABLE)
        np.testing.assert_allclose(first.amplitudes, second.amplitudes, atol=1e-12)

    def test_non_finite_amplitudes_detected(self):
        wp: WavePacket = bound_packet()
        wp.amplitudes[0, 0, 0] = np.nan
        with self.assertRaises(NaNDetectedException):
            step(wp, 0.0, 0.05, PULSE, TABLE)


class TestPropagate(SimpleTestCase):
    def setUp(self):
        self.config = PropagatorConfig(time_step_as=2.0, analysis_interval=10, absorber_z_width=4.0,
                                       absorber_r_width=0.5, tail_extra_au=20.0)
        self.regions = RegionSpec(z_a=8.0)

    def test_probability_is_conserved_with_the_ledger(self):
        result: PropagationResult = propagate(bound_packet(), PULSE, self.config, TABLE, self.regions, run_id='p')
        self.assertAlmostEqual(norm(result.final) + result.ledger.total, 1.0, places=10)

        frame = result.trace.as_frame()
        self.assertEqual(frame['t'].iloc[0], 0.0)
        self.assertGreaterEqual(frame['t'].iloc[-1], PULSE.duration - 1e-9)
        np.testing.assert_allclose(frame['P0'] + frame['P1'] + frame['P2'], frame['norm'], rtol=1e-10)
        self.assertEqual(len(result.trace.snapshots), len(frame))

    def test_tail_is_capped(self):
        result: PropagationResult = propagate(bound_packet(), PULSE, self.config, TABLE, self.regions)
        last: float = result.trace.as_frame()['t'].iloc[-1]
        self.assertLessEqual(last, PULSE.duration + self.config.tail_cap(PULSE) + self.config.time_step)

    def test_field_free_run_settles_after_the_pulse(self):
        dark: PulseParams = PulseParams(intensity=0.0, duration_fs=0.2)
        result: PropagationResult = propagate(bound_packet(), dark, self.config, TABLE, self.regions)
        frame = result.trace.as_frame()
        self.assertLess(frame['P2'].iloc[-1] + result.ledger.absorbed(Region.GAMMA2), 1e-6)
        self.assertLess(frame['t'].iloc[-1], dark.duration + 2.0 * self.config.analysis_interval * self.config.time_step)

    def test_non_finite_initial_state_detected(self):
        wp: WavePacket = bound_packet()
        wp.amplitudes[1, 2, 3] = np.inf
        with self.assertRaises(NaNDetectedException):
            propagate(wp, PULSE, self.config, TABLE, self.regions)

    def test_regions_must_leave_room_for_the_absorber(self):
        with self.assertRaises(GridException):
            propagate(bound_packet(), PULSE, self.config, TABLE, RegionSpec(z_a=12.0))

    def test_initial_state_is_not_modified(self):
        wp: WavePacket = bound_packet()
        original: np.ndarray = wp.amplitudes.copy()
        propagate(wp, PULSE, self.config, TABLE, self.regions)
        np.testing.assert_array_equal(wp.amplitudes, original)

    def test_absorber_acts_after_every_full_step(self):
        result: PropagationResult = propagate(bound_packet(), PULSE, self.config, TABLE, self.regions)
        steps: int = int(round(result.trace.as_frame()['t'].iloc[-1] / self.config.time_step))

        dt: float = self.config.time_step
        propagator: SplitOperatorPropagator = SplitOperatorPropagator(ModelHamiltonian(GRID, TABLE), dt)
        mask: AbsorberMask = build_absorber_mask(GRID, self.config.absorber_z_width, self.config.absorber_r_width)
        wp: WavePacket = bound_packet()
        for index in range(steps):
            propagator.step(wp, index * dt, PULSE)
            apply_absorber(wp, mask)

        np.testing.assert_allclose(result.final.amplitudes, wp.amplitudes, atol=1e-12)

    def test_short_interval_after_the_pulse_does_not_end_the_tail(self):
        # 13 pulse steps: observations at steps 10, 13, 20, 30; 13 -> 20 is not a full interval
        dark: PulseParams = PulseParams(intensity=0.0, duration_fs=0.026)
        result: PropagationResult = propagate(bound_packet(), dark, self.config, TABLE, self.regions)
        times: np.ndarray = result.trace.as_frame()['t'].to_numpy()
        np.testing.assert_allclose(times / self.config.time_step, [0, 10, 13, 20, 30], atol=1e-6)
