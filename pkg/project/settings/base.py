"""
Default settings for the LSS background subtraction tools.

Per-machine overrides go in project/settings/local.py (not tracked).
"""
import os
import sys

BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
SECRET_KEY = 'lssbg-no-web-surface-secret-key-unused'
DEBUG = False

# Application definition

INSTALLED_APPS = [
    'lssbg',
]

# No models are defined, so no database is configured.
DATABASES = {}

USE_TZ = True
TIME_ZONE = 'UTC'

# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'lssbg': {
            'format': '[{asctime}] {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'lssbg',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
        'lssbg': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}

# Test runs only report warnings and errors.
if len(sys.argv) > 1 and sys.argv[1] == 'test':
    LOGGING['loggers']['lssbg']['level'] = 'WARNING'

# Pipeline defaults. Config files and command-line flags override these,
# in that order.

LSSBG_DEFAULTS = {
    # Descriptor
    'patch_size': 5,
    'region_radius': 20,
    'angle_bins': 20,
    'radial_bins': 4,
    # None means 25 * patch_size ** 2.
    'noise_variance': None,
    'component_scale': 255.0,
    # Background model
    'train_threshold': 1.0,
    # Detection
    'detect_threshold': 30.0,
    # Post-processing
    'close_radius': 5,
    'erode_radius': 10,
    # None means region_radius.
    'border_dilate_radius': None,
    'color_threshold': 30.0,
    'final_erode_radius': 1,
    'final_close_radius': 2,
    # Outputs
    'emit_raw_masks': False,
    'emit_core_border': False,
    'workers': 1,
}

LSSBG_MASK_FILENAME = 'bin%06d.png'
LSSBG_RAW_MASK_FILENAME = 'raw%06d.png'
LSSBG_CORE_MASK_FILENAME = 'core%06d.png'
LSSBG_BORDER_MASK_FILENAME = 'border%06d.png'
