import logging

from django.apps import AppConfig as BaseAppConfig


class AppConfig(BaseAppConfig):
    name = 'lssbg'
    verbose_name = 'LSS background subtraction'


def set_log_level(verbosity):
    """
    Map a management command verbosity onto the lssbg logger level.
    """
    logger = logging.getLogger('lssbg')
    if verbosity >= 2:
        logger.setLevel(logging.DEBUG)
    elif verbosity == 0:
        logger.setLevel(logging.WARNING)
    else:
        logger.setLevel(logging.INFO)
