from django.core.management.base import CommandParser

from h2dion.exceptions.simulation import ConfigurationException
from h2dion.management.commands._base import H2DionCommand
from h2dion.orchestration.config import RunConfig
from h2dion.orchestration.scans import DEFAULT_CEP_DURATIONS_FS, cep_scan, intensity_scan, pulse_duration_scan
from h2dion.utils.plotting import write_plot_html


class Command(H2DionCommand):
    help = 'Scan pulse duration, carrier-envelope phase or intensity as set in the [scan] section'

    def add_arguments(self, parser: CommandParser):
        self.add_config_arguments(parser)
        parser.add_argument('--workers', type=int, default=None, help='Scan points run in parallel')
        self.add_html_argument(parser)

    def run(self, **options):
        config: RunConfig = self.load_config(options)
        if config.scan is None:
            raise ConfigurationException('The configuration has no [scan] section')

        workers = options['workers']
        if config.scan.axis == 'duration':
            table = pulse_duration_scan(config, config.scan.values, intensity=None, workers=workers).table
        elif config.scan.axis == 'intensity':
            table = intensity_scan(config, config.scan.values, duration=None, workers=workers).table
        else:
            table = cep_scan(config, config.scan.values, config.scan.durations or DEFAULT_CEP_DURATIONS_FS,
                             workers=workers)

        self.stdout.write(table.to_string(index=False))

        if options['html'] and 'value' in table:
            write_plot_html(options['html'], {'peak': (table['value'], table['peak_eV'])},
                            title=f'KER peak versus {config.scan.axis}', x_title=config.scan.axis,
                            y_title='peak [eV]')
