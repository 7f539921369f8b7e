"""
Django settings for the h2dion simulator.

There is no database and no web front end: Django provides the settings layer,
the management-command CLI and the test runner.
"""
import os

from dotenv import dotenv_values

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Environment variables
secret = {**dotenv_values(os.path.join(BASE_DIR, 'h2dion/.h2dion.env')),
          **{k: v for k, v in os.environ.items() if k.startswith(('H2DION_', 'GRAYLOG_', 'SENTRY_'))}}

SECRET_KEY = secret.get('SECRET_KEY', 'h2dion-local-only')

DEBUG = False

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'h2dion.apps.H2DionConfig',
]

DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

USE_TZ = True
TIME_ZONE = 'UTC'

# Simulation I/O
RUNS_DIR: str = secret.get('H2DION_RUNS_DIR', os.path.join(BASE_DIR, 'runs'))
REFERENCE_DATA_DIR: str = os.path.join(BASE_DIR, 'h2dion/data/reference')
PRESETS_DIR: str = os.path.join(BASE_DIR, 'presets')

# Worker threads handed to scipy.fft; worker processes used by scans and calibration
FFT_WORKERS: int = int(secret.get('H2DION_FFT_WORKERS', 1))
SCAN_WORKERS: int = int(secret.get('H2DION_SCAN_WORKERS', 1))

# Long-running acceptance tests: unset, "1" or "long"
ACCEPTANCE: str = secret.get('H2DION_ACCEPTANCE', '')

GRAYLOG_HOST = secret.get('GRAYLOG_HOST', None)
GRAYLOG_PORT = int(secret.get('GRAYLOG_PORT', 12201))

SENTRY_DSN = secret.get('SENTRY_DSN', None)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        }
    },
    'loggers': {
        'h2dion': {
            'handlers': ['console'],
            'level': secret.get('H2DION_LOG_LEVEL', 'INFO'),
            'propagate': False,
        }
    },
}

if GRAYLOG_HOST:
    LOGGING['handlers']['graypy'] = {
        'level': 'INFO',
        'class': 'graypy.GELFTCPHandler',
        'host': GRAYLOG_HOST,
        'port': GRAYLOG_PORT,
    }
    LOGGING['loggers']['h2dion']['handlers'].append('graypy')

if SENTRY_DSN:
    import sentry_sdk

    sentry_sdk.init(dsn=SENTRY_DSN, traces_sample_rate=0.0)

try:
    from local_settings import *  # noqa
except ImportError:
    pass
