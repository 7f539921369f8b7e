import os

from django.core.management.base import CommandParser

from h2dion.analysis.spectrum import KerSpectrum, peak_energy, write_spectrum
from h2dion.exceptions.simulation import ConfigurationException
from h2dion.management.commands._base import H2DionCommand
from h2dion.tof.calibration import TofCalibration, estimate_t0
from h2dion.tof.channels import BandConfig, extract_channel_spectrum, proton_energy_spectrum
from h2dion.tof.covariance import CovarianceMap, covariance_map, write_covariance_map
from h2dion.tof.shots import ShotDataset, read_shots, write_shots
from h2dion.tof.synthetic import SyntheticChannel, SyntheticShotGenerator
from h2dion.utils.plotting import write_heatmap_html, write_plot_html

COVARIANCE_FILE: str = 'covariance.npz'
CHANNEL_SPECTRUM_FILE: str = 'channel_spectrum.dat'
PROTON_SPECTRUM_FILE: str = 'proton_spectrum.dat'
SYNTHETIC_SHOTS_FILE: str = 'synthetic_shots.npz'


class Command(H2DionCommand):
    help = 'Covariance map of shot-resolved proton TOF traces and the H+ + H+ channel energy spectrum'

    def add_arguments(self, parser: CommandParser):
        parser.add_argument('shots', nargs='?', default=None, help='Shot file (.npz or delimited text)')
        parser.add_argument('--output', required=True, help='Output directory')
        parser.add_argument('--t0', type=float, default=None, help='TOF of zero-momentum protons (ns), '
                                                                   'estimated from the mean trace when omitted')
        parser.add_argument('--field', type=float, default=25.0, help='Collection field (V/cm)')
        parser.add_argument('--delay-offset', type=float, default=None, help='Acquisition delay (ns)')
        parser.add_argument('--half-width', type=float, default=3.0, help='Anti-diagonal band half width (ns)')
        parser.add_argument('--min-separation', type=float, default=5.0,
                            help='Smallest half separation from T0 used (ns)')
        parser.add_argument('--bin-width', type=float, default=0.1, help='Energy bin width (eV)')
        parser.add_argument('--synthetic', type=int, default=None, metavar='N_SHOTS',
                            help='Generate N synthetic shots instead of reading a file')
        parser.add_argument('--energy', type=float, default=3.8, help='Synthetic channel energy per proton (eV)')
        parser.add_argument('--rate', type=float, default=1.0, help='Synthetic events per shot')
        parser.add_argument('--seed', type=int, default=0)
        self.add_html_argument(parser)

    def run(self, **options):
        directory: str = options['output']
        os.makedirs(directory, exist_ok=True)

        if options['synthetic']:
            t0: float = options['t0'] if options['t0'] is not None else 300.0
            generator = SyntheticShotGenerator(
                calibration=TofCalibration(t0_ns=t0, field_v_cm=options['field']),
                channels=(SyntheticChannel(energy_ev=options['energy'], rate=options['rate']),),
                seed=options['seed'])
            shots: ShotDataset = generator.generate(options['synthetic'])
            write_shots(os.path.join(directory, SYNTHETIC_SHOTS_FILE), shots)
        elif options['shots']:
            shots = read_shots(options['shots'])
        else:
            raise ConfigurationException('Give a shot file or --synthetic N_SHOTS')

        t0 = options['t0'] if options['t0'] is not None else estimate_t0(shots.mean_trace(), shots.t_ns)
        delay: float = options['delay_offset'] if options['delay_offset'] is not None else shots.delay_offset_ns
        calibration: TofCalibration = TofCalibration(t0_ns=t0, field_v_cm=options['field'], delay_offset_ns=delay)
        band: BandConfig = BandConfig(half_width_ns=options['half_width'], min_separation_ns=options['min_separation'],
                                      bin_width_ev=options['bin_width'])

        cmap: CovarianceMap = covariance_map(shots)
        write_covariance_map(os.path.join(directory, COVARIANCE_FILE), cmap)
        channel: KerSpectrum = extract_channel_spectrum(cmap, calibration, band)
        write_spectrum(os.path.join(directory, CHANNEL_SPECTRUM_FILE), channel)
        conventional: KerSpectrum = proton_energy_spectrum(shots.mean_trace(), shots.t_ns, calibration,
                                                           bin_width_ev=options['bin_width'])
        write_spectrum(os.path.join(directory, PROTON_SPECTRUM_FILE), conventional)

        self.report([f'{len(shots)} shots, {shots.n_bins} TOF bins, T0={t0:.2f} ns',
                     f'Channel peak {peak_energy(channel)} eV per proton, integrated covariance {channel.total():.4e}',
                     f'Wrote {directory}'])

        if options['html']:
            write_heatmap_html(options['html'], cmap.t_ns, cmap.t_ns, cmap.c2, title='Covariance map',
                               x_title='TOF [ns]', y_title='TOF [ns]')
            write_plot_html(os.path.splitext(options['html'])[0] + '_spectra.html',
                            {'covariance channel': (channel.centers, channel.density),
                             'all protons': (conventional.centers, conventional.density)},
                            title='Proton energy spectra', x_title='E [eV]', y_title='dN/dE [1/eV]')
