import os

from django.core.management.base import CommandParser

from h2dion.analysis.spectrum import KerSpectrum, instantaneous_explosion_spectrum, peak_energy, write_spectrum
from h2dion.management.commands._base import H2DionCommand
from h2dion.numerics.checkpoint import write_checkpoint
from h2dion.orchestration.config import RunConfig
from h2dion.orchestration.runner import GROUND_DENSITY_FILE, GROUND_STATE_FILE, INSTANTANEOUS_SPECTRUM_FILE, \
    load_or_build_table, run_directory
from h2dion.potentials.hamiltonian import ModelHamiltonian
from h2dion.potentials.reference_curve import CurveKind, load_shipped_curve
from h2dion.stationary.ground_state import energy_expectation, hamiltonian_variance, relax_ground_state
from h2dion.stationary.nuclear_density import NuclearDensity, nuclear_density, reference_vibrational_density, \
    write_nuclear_density
from h2dion.utils.plotting import write_plot_html

REFERENCE_DENSITY_FILE: str = 'reference_density.dat'


class Command(H2DionCommand):
    help = 'Relax the non-Born-Oppenheimer ground state and write its nuclear density and explosion spectrum'

    def add_arguments(self, parser: CommandParser):
        self.add_config_arguments(parser)
        parser.add_argument('--output', default=None, help='Output directory, defaults to the run directory')
        self.add_html_argument(parser)

    def run(self, **options):
        config: RunConfig = self.load_config(options)
        directory: str = options['output'] or run_directory(config)
        os.makedirs(directory, exist_ok=True)

        hamiltonian: ModelHamiltonian = ModelHamiltonian(config.grid, load_or_build_table(config))
        ground = relax_ground_state(config.grid, hamiltonian.table, config.relaxation, hamiltonian=hamiltonian)
        write_checkpoint(os.path.join(directory, GROUND_STATE_FILE), ground)

        density: NuclearDensity = nuclear_density(ground)
        reference: NuclearDensity = reference_vibrational_density(load_shipped_curve(CurveKind.H2_GROUND), density.r)
        write_nuclear_density(os.path.join(directory, GROUND_DENSITY_FILE), density)
        write_nuclear_density(os.path.join(directory, REFERENCE_DENSITY_FILE), reference)

        spectrum: KerSpectrum = instantaneous_explosion_spectrum(ground)
        write_spectrum(os.path.join(directory, INSTANTANEOUS_SPECTRUM_FILE), spectrum)

        self.report([f'Ground state energy {energy_expectation(ground, hamiltonian):.8f} Eh '
                     f'(variance {hamiltonian_variance(ground, hamiltonian):.2e})',
                     f'Nuclear density peak at R={density.peak():.4f} a.u., '
                     f'L2 distance to the reference v=0 density {density.relative_l2_distance(reference):.4f}',
                     f'Instantaneous explosion peak {peak_energy(spectrum)} eV',
                     f'Wrote {directory}'])

        if options['html']:
            write_plot_html(options['html'], {'model': (density.r, density.p), 'reference v=0': (reference.r, reference.p)},
                            title='Ground state nuclear density', x_title='R [a.u.]', y_title='P(R)')
