"""
Django settings for cantordim_project project.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', 'cantordim-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition
INSTALLED_APPS = [
    # Local apps
    'core',
    'expansion',
    'closed_form',
    'variational',
    'measure_sampler',
    'cli',
]

# No database: every computation is in-process and tests use SimpleTestCase.
DATABASES = {}


# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True


# ═══════════════════════════════════════════════════════════════
# 🔢 NUMERICS
# ═══════════════════════════════════════════════════════════════

CANTORDIM = {
    'TOLERANCE': float(os.getenv('CANTORDIM_TOLERANCE', '1e-12')),
    'DENOMINATOR_LIMIT': int(os.getenv('CANTORDIM_DENOMINATOR_LIMIT', '1000000')),
    'EXACT_CYLINDER_DEPTH': int(os.getenv('CANTORDIM_EXACT_CYLINDER_DEPTH', '64')),

    'SOLVER_METHOD': os.getenv('CANTORDIM_SOLVER_METHOD', 'ipf'),
    'SOLVER_TOL': float(os.getenv('CANTORDIM_SOLVER_TOL', '1e-10')),
    'SOLVER_MAX_ITER': int(os.getenv('CANTORDIM_SOLVER_MAX_ITER', '100000')),
    'MIRROR_STEP': float(os.getenv('CANTORDIM_MIRROR_STEP', '0.5')),

    'KIFER_SAMPLE_TOL': float(os.getenv('CANTORDIM_KIFER_SAMPLE_TOL', '1e-9')),
    'KIFER_SOLVER_TOL': float(os.getenv('CANTORDIM_KIFER_SOLVER_TOL', '1e-6')),

    'SIGMA': float(os.getenv('CANTORDIM_SIGMA', '4')),
    'RNG_ALGORITHM': 'PCG64',

    'OUTPUT_DIGITS': 15,
}


# ═══════════════════════════════════════════════════════════════
# 📝 LOGGING
# ═══════════════════════════════════════════════════════════════

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
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
        'level': os.getenv('CANTORDIM_LOG_LEVEL', 'WARNING'),
    },
}
