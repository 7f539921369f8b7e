from django.core.management.base import CommandParser

from h2dion.management.commands._base import H2DionCommand
from h2dion.orchestration.runner import RunArtifacts, run_simulation
from h2dion.utils.plotting import write_plot_html


class Command(H2DionCommand):
    help = 'Run one simulation: ground state, propagation and KER spectrum under runs/<run-id>/'

    def add_arguments(self, parser: CommandParser):
        self.add_config_arguments(parser)
        self.add_html_argument(parser)

    def run(self, **options):
        artifacts: RunArtifacts = run_simulation(self.load_config(options))
        self.report([f'Run directory: {artifacts.directory}',
                     f'KER peak: {artifacts.peak_ev} eV',
                     f'Single ionization: {artifacts.single_ionization:.4e}',
                     f'Double ionization: {artifacts.double_ionization:.4e}'])

        if options['html']:
            spectrum = artifacts.spectrum
            write_plot_html(options['html'], {'KER': (spectrum.centers, spectrum.density)},
                            title='Kinetic energy release', x_title='KER [eV]', y_title='dP/dE [1/eV]')
