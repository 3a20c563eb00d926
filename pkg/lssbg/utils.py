import os
import tempfile
from contextlib import contextmanager

__all__ = [
    'ArgumentError',
    'FormatError',
    'LssError',
    'StateError',
    'UsageError',
    'atomic_write',
    'exception_to_msglist',
    'timer_str',
]


class LssError(Exception):
    """
    Base for every error raised by this package. The message is always safe
    to display to end-users.
    """
    pass


class ArgumentError(LssError, ValueError):
    """
    An argument is invalid, e.g. a dimension mismatch between two rasters.
    """
    pass


class FormatError(LssError):
    """
    Some input (image, model file, ground truth, ROI file) could not be
    decoded or does not have the expected layout.
    """
    pass


class StateError(LssError):
    """
    The operation is not possible in the object's current state.
    """
    pass


class UsageError(LssError):
    """
    The configuration or command-line options are unusable.
    """
    pass


def exception_to_msglist(ex):
    errors = []
    for arg in ex.args:
        if isinstance(arg, str):
            errors.append(arg)
        elif isinstance(arg, dict):
            for field, messages in arg.items():
                errors += [
                    f'{field}: {message}'
                    if field != '__all__' else message
                    for message in messages
                ]
    return errors


@contextmanager
def atomic_write(path, mode='wb'):
    """
    Open a temporary file next to path and move it into place once the
    block exits cleanly. The destination either appears complete or not at
    all.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(
        dir=directory,
        prefix='.' + os.path.basename(path) + '.',
        suffix='.tmp',
    )
    try:
        with os.fdopen(fd, mode) as fh:
            yield fh
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def timer_str(seconds):
    """
    Format an elapsed duration in seconds as h:mm:ss.d
    """
    hours, remainder = divmod(seconds, 3600)
    minutes, secs = divmod(remainder, 60)
    return '{:01}:{:02}:{:02}.{}'.format(
        int(hours),
        int(minutes),
        int(secs),
        min(int(round((secs - int(secs)) * 10)), 9),
    )
