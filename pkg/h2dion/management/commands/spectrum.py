import os

from django.core.management.base import CommandParser

from h2dion.analysis.spectrum import AccumulationMode, KerMapping, KerSpectrum, accumulate_spectrum, \
    instantaneous_explosion_spectrum, peak_energy, write_spectrum
from h2dion.management.commands._base import H2DionCommand
from h2dion.numerics.checkpoint import read_checkpoint
from h2dion.orchestration.runner import LEDGER_FILE, SNAPSHOTS_FILE, TRACE_FILE
from h2dion.propagation.ledger import read_ledger
from h2dion.propagation.trace import read_trace
from h2dion.utils.plotting import write_plot_html


class Command(H2DionCommand):
    help = 'Rebuild the KER spectrum of a finished run, or the instantaneous explosion spectrum of a checkpoint'

    def add_arguments(self, parser: CommandParser):
        parser.add_argument('source', help='Run directory, or a wavepacket checkpoint with --instantaneous')
        parser.add_argument('--instantaneous', action='store_true',
                            help='Treat the source as a ground-state checkpoint')
        parser.add_argument('--mode', default=AccumulationMode.FLUX_RESIDUAL.value,
                            choices=[mode.value for mode in AccumulationMode])
        parser.add_argument('--mapping', default=KerMapping.LINEAR.value, choices=[mapping.value for mapping in KerMapping],
                            help='point: each R sample into one bin; linear: P(R) interpolated between samples')
        parser.add_argument('--bin-width', type=float, default=0.05, help='Bin width in eV')
        parser.add_argument('--max-energy', type=float, default=25.0, help='Upper edge in eV')
        parser.add_argument('--output', required=True, help='Spectrum file to write')
        self.add_html_argument(parser)

    def run(self, **options):
        binning = {'bin_width_ev': options['bin_width'], 'max_energy_ev': options['max_energy'],
                   'mapping': KerMapping(options['mapping'])}
        source: str = options['source']

        if options['instantaneous']:
            spectrum: KerSpectrum = instantaneous_explosion_spectrum(read_checkpoint(source), **binning)
        else:
            trace = read_trace(os.path.join(source, TRACE_FILE), os.path.join(source, SNAPSHOTS_FILE))
            ledger = read_ledger(os.path.join(source, LEDGER_FILE))
            spectrum = accumulate_spectrum(trace, ledger, AccumulationMode(options['mode']), **binning)

        write_spectrum(options['output'], spectrum)
        self.report([f'Wrote {options["output"]}',
                     f'Peak {peak_energy(spectrum)} eV, total {spectrum.total():.4e}'])

        if options['html']:
            write_plot_html(options['html'], {'KER': (spectrum.centers, spectrum.density)},
                            title='Kinetic energy release', x_title='KER [eV]', y_title='dP/dE [1/eV]')
