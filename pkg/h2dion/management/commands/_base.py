from typing import Dict, List, Optional

import sentry_sdk
from django.core.management.base import BaseCommand, CommandError, CommandParser

from h2dion.exceptions.simulation import ArtifactIOException, H2DionException, NumericalFailureException
from h2dion.orchestration.config import RunConfig, load_run_config
from h2dion.utils.h2dion_logger import H2DionLogger

logger: H2DionLogger = H2DionLogger(__name__, '[Command]')

EXIT_CONFIGURATION: int = 1
EXIT_NUMERICAL: int = 2
EXIT_IO: int = 3


def exit_code_for(exception: H2DionException) -> int:
    if isinstance(exception, NumericalFailureException):
        return EXIT_NUMERICAL
    if isinstance(exception, ArtifactIOException):
        return EXIT_IO
    return EXIT_CONFIGURATION


class H2DionCommand(BaseCommand):
    """
    Maps the h2dion exception hierarchy to exit codes: configuration 1, numerical 2, I/O 3.
    Subclasses implement `run`.
    """

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except H2DionException as e:
            if isinstance(e, NumericalFailureException):
                sentry_sdk.capture_exception(e)
            logger.error(f'{type(e).__name__}: {e.message}')
            raise CommandError(e.message, returncode=exit_code_for(e))
        except OSError as e:
            raise CommandError(str(e), returncode=EXIT_IO)

    def run(self, **options) -> Optional[str]:
        raise NotImplementedError

    @staticmethod
    def add_config_arguments(parser: CommandParser, required: bool = True):
        parser.add_argument('config', nargs=None if required else '?', default=None,
                            help='Run configuration (INI)')
        parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='SECTION.KEY=VALUE',
                            help='Override one configuration key, may be repeated')

    @staticmethod
    def add_html_argument(parser: CommandParser):
        parser.add_argument('--html', default=None, metavar='PATH', help='Also render a plotly HTML figure')

    @staticmethod
    def load_config(options: Dict) -> RunConfig:
        return load_run_config(options.get('config'), options.get('overrides') or [])

    def report(self, lines: List[str]):
        for line in lines:
            self.stdout.write(line)

