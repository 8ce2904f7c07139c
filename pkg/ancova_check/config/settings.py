"""
Settings for ancova-check.

Values come from the environment (optionally a local .env file) and fall back
to the defaults below. CLI flags override them per invocation.
"""

import logging
import logging.config
import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent


# Reproducibility and inference defaults
DEFAULT_SEED = int(os.getenv('ANCOVA_SEED', '20240101'))
DEFAULT_LEVEL = float(os.getenv('ANCOVA_LEVEL', '0.95'))
N_WORKERS = int(os.getenv('ANCOVA_WORKERS', '1'))

OUTPUT_DIR = Path(os.getenv('ANCOVA_OUTPUT_DIR', 'results'))
SCENARIO_DIR = Path(os.getenv('ANCOVA_SCENARIO_DIR', str(BASE_DIR / 'scenarios')))


# Numerical guards for the OLS fit
CONDITION_LIMIT = float(os.getenv('ANCOVA_CONDITION_LIMIT', '1e12'))
RANK_TOLERANCE = float(os.getenv('ANCOVA_RANK_TOLERANCE', '1e-10'))

# Standard errors at or below this multiple of the outcome scale count as zero
ZERO_SE_TOLERANCE = float(os.getenv('ANCOVA_ZERO_SE_TOLERANCE', '1e-10'))


# Brute-force population limits
BRUTE_FORCE_DRAWS = int(float(os.getenv('ANCOVA_BRUTE_FORCE_DRAWS', '1e7')))
BRUTE_FORCE_CHUNK = int(float(os.getenv('ANCOVA_BRUTE_FORCE_CHUNK', '1e6')))
MIN_BRUTE_FORCE_DRAWS = 100_000
# Brute-force results kept in memory, least recently used evicted first
BRUTE_FORCE_CACHE_SIZE = int(os.getenv('ANCOVA_BRUTE_FORCE_CACHE_SIZE', '32'))

# Draws used when a simulation needs a brute-force reference (nonlinear DGPs)
REFERENCE_DRAWS = int(float(os.getenv('ANCOVA_REFERENCE_DRAWS', '2e6')))


# Simulation policy
REDRAW_ABORT_RATE = float(os.getenv('ANCOVA_REDRAW_ABORT_RATE', '0.01'))

# analyze warns when |pi_hat - 1/2| exceeds this and a model-based SE is requested
PI_WARNING_MARGIN = float(os.getenv('ANCOVA_PI_WARNING_MARGIN', '0.05'))


# Logging configuration
LOG_LEVEL = os.getenv('ANCOVA_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'ancova_check': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}


def configure_logging(level: str | None = None) -> None:
    """Apply LOGGING, optionally overriding the package log level"""
    config = {**LOGGING, 'loggers': {name: dict(cfg) for name, cfg in LOGGING['loggers'].items()}}
    if level:
        config['loggers']['ancova_check']['level'] = level.upper()
    logging.config.dictConfig(config)
