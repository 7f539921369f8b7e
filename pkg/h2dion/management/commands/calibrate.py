import os
from dataclasses import replace

from django.core.management.base import CommandParser

from h2dion.management.commands._base import H2DionCommand
from h2dion.orchestration.config import RunConfig
from h2dion.potentials.calibration import CalibrationConfig, build_softcore_table
from h2dion.potentials.reference_curve import CurveKind, load_reference_curve, load_shipped_curve
from h2dion.potentials.softcore_table import SoftCoreTable, write_softcore_table
from h2dion.utils.plotting import write_plot_html


class Command(H2DionCommand):
    help = 'Calibrate the R-dependent soft-core parameters beta(R), alpha(R) against the reference curves'

    def add_arguments(self, parser: CommandParser):
        self.add_config_arguments(parser)
        parser.add_argument('--output', default=None, help='Table path, defaults to run.softcore_table')
        parser.add_argument('--h2', default=None, help='H2 reference curve file instead of the shipped one')
        parser.add_argument('--h2plus', default=None, help='H2+ reference curve file instead of the shipped one')
        parser.add_argument('--workers', type=int, default=None, help='Calibrate R samples in parallel')
        self.add_html_argument(parser)

    def run(self, **options):
        config: RunConfig = self.load_config(options)
        solver: CalibrationConfig = config.calibration.solver
        if options['workers']:
            solver = replace(solver, workers=options['workers'])

        ref_h2 = load_reference_curve(options['h2'], CurveKind.H2_GROUND) if options['h2'] \
            else load_shipped_curve(CurveKind.H2_GROUND)
        ref_h2p = load_reference_curve(options['h2plus'], CurveKind.H2PLUS_GROUND) if options['h2plus'] \
            else load_shipped_curve(CurveKind.H2PLUS_GROUND)

        table: SoftCoreTable = build_softcore_table(ref_h2, ref_h2p, config.calibration.r_samples, solver)
        path: str = options['output'] or config.softcore_table
        if os.path.dirname(path):
            os.makedirs(os.path.dirname(path), exist_ok=True)
        write_softcore_table(path, table)

        worst_h2p, worst_h2 = table.max_residuals
        self.report([f'Wrote {len(table.r)} R samples to {path}',
                     f'Largest residuals: H2+ {worst_h2p:.2e} Eh, H2 {worst_h2:.2e} Eh'])

        if options['html']:
            write_plot_html(options['html'], {'beta': (table.r, table.beta), 'alpha': (table.r, table.alpha)},
                            title='Soft-core parameters', x_title='R [a.u.]', y_title='parameter [a.u.]')
