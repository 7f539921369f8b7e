import math
import os

import numpy as np
from django.core.management.base import CommandParser

from h2dion.laser.diagnostics import AutocorrelationTrace, apply_spectral_phase, fused_silica_gdd, \
    fused_silica_thickness_scan, intensity_fwhm, interferometric_autocorrelation
from h2dion.laser.pulse import PulseParams, SampledField, sample_pulse, write_sampled_field
from h2dion.management.commands._base import H2DionCommand
from h2dion.utils.plotting import write_plot_html
from h2dion.utils.text_io import write_table
from h2dion.utils.units import AtomicUnits

FIELD_FILE: str = 'field.dat'
AUTOCORRELATION_FILE: str = 'autocorrelation.dat'
THICKNESS_SCAN_FILE: str = 'thickness_scan.dat'


def default_padding_fs(pulse: PulseParams, prechirp_gdd: float, thicknesses_mm) -> float:
    """
    Twice the pulse duration plus three times the Gaussian-pulse stretch 4 ln2 GDD / FWHM
    at the largest dispersion scanned.
    """
    largest_gdd: float = abs(prechirp_gdd) + fused_silica_gdd(max(thicknesses_mm, default=0.0))
    stretch: float = 4.0 * math.log(2.0) * largest_gdd / pulse.fwhm_fs
    return 2.0 * pulse.duration_fs + 3.0 * stretch


class Command(H2DionCommand):
    help = 'Pulse diagnostics: sampled field, interferometric autocorrelation and fused-silica dispersion scan'

    def add_arguments(self, parser: CommandParser):
        self.add_config_arguments(parser, required=False)
        parser.add_argument('--output', required=True, help='Output directory')
        parser.add_argument('--samples-per-cycle', type=int, default=64)
        parser.add_argument('--padding-fs', type=float, default=None,
                            help='Zero field added on both sides, defaults to fit the most dispersed pulse')
        parser.add_argument('--prechirp-gdd', type=float, default=0.0, help='GDD on the input pulse (fs^2)')
        parser.add_argument('--thickness-mm', type=float, nargs='*', default=[0.0, 1.0, 2.0, 3.0],
                            help='Added fused-silica thicknesses to scan')
        parser.add_argument('--delays', type=int, default=401, help='Number of autocorrelation delays')
        self.add_html_argument(parser)

    def run(self, **options):
        pulse: PulseParams = self.load_config(options).pulse
        directory: str = options['output']
        os.makedirs(directory, exist_ok=True)

        padding: float = options['padding_fs'] if options['padding_fs'] is not None \
            else default_padding_fs(pulse, options['prechirp_gdd'], options['thickness_mm'])
        field: SampledField = sample_pulse(pulse, options['samples_per_cycle'], padding_fs=padding)
        if options['prechirp_gdd']:
            field = apply_spectral_phase(field, options['prechirp_gdd'])
        write_sampled_field(os.path.join(directory, FIELD_FILE), field)

        max_delay: float = pulse.duration
        trace: AutocorrelationTrace = interferometric_autocorrelation(
            field, np.linspace(-max_delay, max_delay, options['delays']))
        write_table(os.path.join(directory, AUTOCORRELATION_FILE),
                    {'delay_fs': AtomicUnits.au_to_fs(trace.delays), 'IAC': trace.values},
                    metadata={'normalization': 'background = 1'})

        scan = fused_silica_thickness_scan(field, options['thickness_mm'], initial_gdd_fs2=0.0)
        write_table(os.path.join(directory, THICKNESS_SCAN_FILE), {name: scan[name].to_numpy() for name in scan.columns},
                    metadata={'prechirp_gdd_fs2': options['prechirp_gdd']})

        lines = [f'Envelope FWHM {AtomicUnits.au_to_fs(intensity_fwhm(field)):.3f} fs '
                 f'(nominal {pulse.fwhm_fs:.3f} fs)',
                 f'IAC peak to background {float(np.max(trace.values)):.4f}']
        lines += [f'{row.thickness_mm:g} mm fused silica: GDD {row.gdd_fs2:.1f} fs2, FWHM {row.fwhm_fs:.3f} fs'
                  for row in scan.itertuples()]
        self.report(lines + [f'Wrote {directory}'])

        if options['html']:
            write_plot_html(options['html'], {'IAC': (AtomicUnits.au_to_fs(trace.delays), trace.values)},
                            title='Interferometric autocorrelation', x_title='delay [fs]', y_title='IAC')
