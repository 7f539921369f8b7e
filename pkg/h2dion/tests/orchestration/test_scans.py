import math
import os
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase
from pyfakefs.fake_filesystem_unittest import Patcher

from h2dion.analysis.regions import RegionSpec
from h2dion.exceptions.simulation import ConfigurationException, NaNDetectedException
from h2dion.laser.pulse import PulseParams
from h2dion.numerics.grid import GridSpec
from h2dion.numerics.wavepacket import WavePacket, normalize
from h2dion.orchestration.config import RunConfig
from h2dion.orchestration.runner import RunArtifacts
from h2dion.orchestration.scans import PEAK_TABLE_FILE, SHIFT_TABLE_FILE, ScanResult, ScanSpec, cep_scan, \
    intensity_scan, pulse_duration_scan, run_scan
from h2dion.propagation.propagator import PropagatorConfig

GRID: GridSpec = GridSpec(n_r=8, n_z1=32, n_z2=32, r_min=0.6, r_max=3.0, z_max=16.0)
BASE: RunConfig = RunConfig(grid=GRID, pulse=PulseParams(intensity=8e14, duration_fs=4.0),
                            propagator=PropagatorConfig(absorber_z_width=4.0), regions=RegionSpec(z_a=8.0),
                            output_dir='scans', run_id='scan')


def ground_packet() -> WavePacket:
    wp: WavePacket = WavePacket.zeros(GRID)
    wp.amplitudes = (np.exp(-((wp.axes.r - 1.4) / 0.2) ** 2)[:, None, None]
                     * np.ones((GRID.n_z1, GRID.n_z2))[None, :, :]).astype(np.complex128)
    return normalize(wp)


def fake_run(config: RunConfig) -> RunArtifacts:
    """
    Peak energy and double ionization as simple functions of the pulse.
    """
    pulse: PulseParams = config.pulse
    if config.run_id == 'duration_2fs':
        raise NaNDetectedException('norm became nan')
    peak: float = 3.0 + 0.1 * pulse.duration_fs + 0.5 * math.cos(pulse.cep) / pulse.duration_fs
    return RunArtifacts(directory=os.path.join(config.output_dir, config.run_id), manifest='', spectrum=None,
                        peak_ev=peak, single_ionization=0.01, double_ionization=pulse.intensity * 1e-18)


class ScanTestCase(SimpleTestCase):
    def setUp(self):
        self.patcher = Patcher()
        self.patcher.setUp()
        self.addCleanup(self.patcher.tearDown)
        patch('h2dion.orchestration.scans.run_simulation', side_effect=fake_run).start()
        patch('h2dion.orchestration.scans.share_ground_state',
              side_effect=lambda base, directory: (base, ground_packet())).start()
        self.addCleanup(patch.stopall)


class TestScanSpec(SimpleTestCase):
    def test_invalid_scans(self):
        for axis, values in (('wavelength', (1.0,)), ('duration', ()), ('duration', (1.0, -2.0)),
                             ('intensity', (-1e14,)), ('cep', (0.0, 0.0)), ('cep', (float('nan'),))):
            with self.subTest(axis=axis, values=values):
                with self.assertRaises(ConfigurationException):
                    ScanSpec(axis=axis, values=values, base=BASE)

    def test_point_configs(self):
        scan: ScanSpec = ScanSpec(axis='duration', values=(1.0, 4.0), base=BASE)
        config: RunConfig = scan.point_config(1.0)
        self.assertEqual(config.run_id, 'duration_1fs')
        self.assertEqual(config.output_dir, os.path.join('scans', 'scan'))
        self.assertEqual(config.pulse.duration_fs, 1.0)
        self.assertEqual(config.pulse.intensity, 8e14)

        cep: RunConfig = ScanSpec(axis='cep', values=(math.pi,), base=BASE).point_config(math.pi)
        self.assertEqual(cep.run_id, 'cep_3.1416rad')
        self.assertAlmostEqual(cep.pulse.cep, math.pi, places=12)


class TestRunScan(ScanTestCase):
    def test_failed_point_is_recorded_and_the_rest_continue(self):
        result: ScanResult = run_scan(ScanSpec(axis='duration', values=(1.0, 2.0, 4.0), base=BASE), workers=1)
        statuses = [point.status for point in result.points]
        self.assertEqual(statuses, ['ok', 'failed:NaNDetectedException', 'ok'])
        self.assertTrue(math.isnan(result.points[1].peak_ev))
        self.assertAlmostEqual(result.points[2].peak_ev, 3.0 + 0.4 + 0.125, places=12)
        self.assertTrue(os.path.exists(os.path.join('scans', 'scan', PEAK_TABLE_FILE)))
        self.assertIsNotNone(result.reference_peak_ev)

    def test_order_independent(self):
        forward: ScanResult = run_scan(ScanSpec(axis='intensity', values=(1e14, 4e14), base=BASE), workers=1)
        backward: ScanResult = run_scan(ScanSpec(axis='intensity', values=(4e14, 1e14), base=BASE), workers=1)
        by_value = {point.value: point for point in forward.points}
        for point in backward.points:
            self.assertEqual(point.run_id, by_value[point.value].run_id)
            self.assertEqual(point.peak_ev, by_value[point.value].peak_ev)
            self.assertEqual(point.p2_total, by_value[point.value].p2_total)


class TestScanDrivers(ScanTestCase):
    def test_duration_scan_adds_the_instantaneous_reference(self):
        result: ScanResult = pulse_duration_scan(BASE, durations=(1.0, 4.0, 10.0), workers=1)
        table = result.table
        self.assertEqual(list(table['value']), [0.0, 1.0, 4.0, 10.0])
        self.assertEqual(table['status'].iloc[0], 'instantaneous')
        self.assertAlmostEqual(table['peak_eV'].iloc[0], result.reference_peak_ev, places=12)

        self.assertTrue(os.path.exists(os.path.join('scans', 'scan', PEAK_TABLE_FILE)))

    def test_cep_shift_table(self):
        table = cep_scan(BASE, ceps=(0.0, math.pi / 2.0), durations=(1.0, 4.0), workers=1)
        self.assertEqual(list(table['duration_fs']), [1.0, 4.0])
        self.assertAlmostEqual(table['shift_eV'].iloc[0], 0.5, places=10)
        self.assertAlmostEqual(table['shift_eV'].iloc[1], 0.125, places=10)
        self.assertTrue(os.path.exists(os.path.join('scans', 'scan', SHIFT_TABLE_FILE)))

    def test_cep_scan_needs_two_phases(self):
        with self.assertRaises(ConfigurationException):
            cep_scan(BASE, ceps=(0.0,), workers=1)

    def test_intensity_scan_carries_the_measured_peaks(self):
        result: ScanResult = intensity_scan(BASE, intensities=(1e14, 8e14, 3e14), workers=1)
        measured = list(result.table['experimental_peak_eV'])
        self.assertEqual(measured[:2], [4.2, 5.5])
        self.assertTrue(math.isnan(measured[2]))
        self.assertTrue(all(point.status == 'ok' for point in result.points))
        self.assertEqual(result.points[0].p2_total, 1e14 * 1e-18)
