import math

from django.test import SimpleTestCase
from pyfakefs.fake_filesystem_unittest import Patcher

from h2dion.analysis.spectrum import AccumulationMode
from h2dion.exceptions.simulation import ConfigurationException
from h2dion.laser.pulse import SIN2_FWHM_RATIO, EnvelopeKind
from h2dion.orchestration.config import RunConfig, dump_run_config, load_run_config, parse_overrides

MINIMAL: str = """
[pulse]
intensity = 8e14
duration_fs = 4
"""

FULL: str = """
[run]
run_id = tiny
output_dir = runs
softcore_table = table.dat  # calibrated table
accumulation_mode = final-snapshot
seed = 7

[grid]
n_r = 16
n_z1 = 64
n_z2 = 64
r_min = 0.6
r_max = 4.0
z_max = 40.0

[pulse]
intensity = 2e14
fwhm_fs = 1.0
cep = pi/2
envelope = gaussian

[propagator]
time_step_as = 2
analysis_interval = 20
absorber_z_width = 8

[regions]
z_a = 20

[scan]
axis = cep
values = 0, 0.5*pi, pi
durations = 1, 2
"""


def load_text(text: str, overrides=()) -> RunConfig:
    with Patcher():
        with open('run.ini', 'w') as f:
            f.write(text)
        return load_run_config('run.ini', overrides)


class TestLoadRunConfig(SimpleTestCase):
    def test_defaults(self):
        config: RunConfig = load_text(MINIMAL)
        self.assertEqual(config.pulse.intensity, 8e14)
        self.assertEqual(config.pulse.duration_fs, 4.0)
        self.assertEqual(config.pulse.envelope, EnvelopeKind.SIN2)
        self.assertEqual(config.grid.shape, (128, 256, 256))
        self.assertEqual(config.regions.z_a, 20.0)
        self.assertEqual(config.run_id, 'run')
        self.assertEqual(config.accumulation_mode, AccumulationMode.FLUX_RESIDUAL)
        self.assertFalse(config.calibration.auto_build)
        self.assertIsNone(config.scan)

    def test_full_file(self):
        config: RunConfig = load_text(FULL)
        self.assertEqual(config.run_id, 'tiny')
        self.assertEqual(config.softcore_table, 'table.dat')
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.accumulation_mode, AccumulationMode.FINAL_SNAPSHOT)
        self.assertEqual(config.grid.shape, (16, 64, 64))
        self.assertAlmostEqual(config.pulse.duration_fs, 1.0 / SIN2_FWHM_RATIO, places=12)
        self.assertAlmostEqual(config.pulse.cep, math.pi / 2.0, places=12)
        self.assertEqual(config.pulse.envelope, EnvelopeKind.GAUSSIAN)
        self.assertAlmostEqual(config.propagator.time_step_as, 2.0)
        self.assertEqual(config.scan.axis, 'cep')
        self.assertEqual(len(config.scan.values), 3)
        self.assertAlmostEqual(config.scan.values[1], math.pi / 2.0, places=12)
        self.assertEqual(config.scan.durations, (1.0, 2.0))

    def test_overrides(self):
        config: RunConfig = load_text(MINIMAL, ['pulse.intensity=1e14', 'run.run_id=override', 'grid.n_r=64'])
        self.assertEqual(config.pulse.intensity, 1e14)
        self.assertEqual(config.run_id, 'override')
        self.assertEqual(config.grid.n_r, 64)

    def test_config_from_overrides_only(self):
        config: RunConfig = load_run_config(None, ['pulse.intensity=0', 'pulse.duration_fs=2'])
        self.assertEqual(config.pulse.intensity, 0.0)

    def test_malformed_overrides(self):
        for override in ('pulse.intensity', 'intensity=1e14', '.intensity=1', 'pulse.=1'):
            with self.assertRaises(ConfigurationException):
                parse_overrides([override])

    def test_rejections(self):
        cases = {
            'unknown key': MINIMAL + 'colour = blue\n',
            'unknown section': MINIMAL + '[laser]\nintensity = 1\n',
            'both durations': MINIMAL + 'fwhm_fs = 1\n',
            'negative intensity': '[pulse]\nintensity = -1\nduration_fs = 4\n',
            'no duration': '[pulse]\nintensity = 1e14\n',
            'bad phase': MINIMAL + 'cep = half\n',
            'bad envelope': MINIMAL + 'envelope = square\n',
            'grid not a power of two': MINIMAL + '[grid]\nn_r = 100\n',
            'absorber beyond the grid': MINIMAL + '[grid]\nz_max = 25\n',
            'unknown scan axis': MINIMAL + '[scan]\naxis = wavelength\nvalues = 1\n',
            'empty scan': MINIMAL + '[scan]\naxis = cep\nvalues =\n',
            'unknown accumulation': '[run]\naccumulation_mode = average\n' + MINIMAL,
            'no pulse': '[grid]\nn_r = 64\n',
        }
        for name, text in cases.items():
            with self.subTest(name):
                with self.assertRaises(ConfigurationException):
                    load_text(text)

    def test_missing_file(self):
        with Patcher():
            with self.assertRaises(ConfigurationException):
                load_run_config('missing.ini')


class TestDumpRunConfig(SimpleTestCase):
    def test_dumped_config_loads_equal(self):
        with Patcher():
            with open('run.ini', 'w') as f:
                f.write(FULL)
            config: RunConfig = load_run_config('run.ini')
            dump_run_config('effective.ini', config)
            reloaded: RunConfig = load_run_config('effective.ini')
        self.assertEqual(reloaded, config)

    def test_with_pulse_and_describe(self):
        config: RunConfig = load_text(FULL).with_pulse(duration_fs=10.0, cep=0.0)
        self.assertEqual(config.pulse.duration_fs, 10.0)
        self.assertEqual(config.pulse.intensity, 2e14)
        described = config.describe()
        self.assertEqual(described['run_id'], 'tiny')
        self.assertEqual(described['grid']['n_r'], 16)
        self.assertEqual(described['accumulation_mode'], 'final-snapshot')
