import os
import sys
import time

from django.core.management import BaseCommand, CommandError
from django.core.management.base import CommandParser

from ..apps import set_log_level
from ..evaluation import INPUT_PATTERN, is_video_dir, load_dataset, numbered_files
from ..forms import RunConfig
from ..utils import LssError, UsageError, exception_to_msglist, timer_str

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_FORMAT = 3

LSS_FLAGS = (
    ('patch_size', int, 'Side of the compared patch in pixels (odd).'),
    ('region_radius', int, 'Radius of the correlation region in pixels.'),
    ('angle_bins', int, 'Number of angular bins.'),
    ('radial_bins', int, 'Number of radial bins.'),
    ('noise_variance', float, 'Lower bound of the surface normalisation.'),
    ('component_scale', float, 'Largest descriptor component after stretching.'),
)
DETECT_FLAGS = (
    ('detect_threshold', float, 'Descriptor distance over which a pixel is foreground.'),
    ('close_radius', int, 'Radius of the hole-filling closing.'),
    ('erode_radius', int, 'Radius of the core erosion.'),
    ('border_dilate_radius', int, 'Width of the border band.'),
    ('color_threshold', float, 'Colour distance over which a border pixel is kept.'),
    ('final_erode_radius', int, 'Radius of the final clean-up erosion.'),
    ('final_close_radius', int, 'Radius of the final clean-up closing.'),
    ('emit_raw_masks', bool, 'Also write the unrefined masks.'),
    ('emit_core_border', bool, 'Also write the core and border masks.'),
    ('workers', int, 'Number of frames processed in parallel.'),
)


class UsageCommandParser(CommandParser):
    """
    Report argument errors with the usage exit code (1) instead of
    argparse's default of 2.
    """
    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(EXIT_USAGE, '%s: error: %s\n' % (self.prog, message))
        raise CommandError('Error: %s' % message, returncode=EXIT_USAGE)


class PipelineCommand(BaseCommand):
    """
    Base for pipeline commands: config loading, parameter flags and the
    mapping of errors onto exit codes.
    """
    # (key, type, help) for every parameter flag the command accepts.
    parameter_flags = ()

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.__class__ = UsageCommandParser
        return parser

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            help='Config file of "key = value" lines. Flags win over its values.',
        )
        for key, value_type, help_text in self.parameter_flags:
            flag = '--' + key.replace('_', '-')
            if value_type is bool:
                parser.add_argument(flag, dest=key, action='store_true', default=None, help=help_text)
            else:
                parser.add_argument(flag, dest=key, type=value_type, help=help_text)

    def handle(self, *args, **options):
        set_log_level(options['verbosity'])
        started = time.monotonic()
        try:
            self.run(options)
        except UsageError as ex:
            raise CommandError('\n'.join(exception_to_msglist(ex)), returncode=EXIT_USAGE)
        except LssError as ex:
            raise CommandError('\n'.join(exception_to_msglist(ex)), returncode=EXIT_FORMAT)
        except OSError as ex:
            raise CommandError(str(ex), returncode=EXIT_IO)
        if options['verbosity'] >= 2:
            self.stdout.write('Finished in %s.' % timer_str(time.monotonic() - started))

    def run(self, options):
        raise NotImplementedError

    def get_config(self, options, **extra):
        overrides = {key: options.get(key) for key, _, _ in self.parameter_flags}
        overrides.update(extra)
        return RunConfig.from_sources(options.get('config'), overrides)


def numbered_frames(path):
    """
    {frame number: path} for a benchmark video directory or a directory of
    in%06d.{jpg,png} frames.
    """
    if is_video_dir(path):
        return load_dataset(path).inputs
    if not os.path.isdir(path):
        raise FileNotFoundError('Missing directory: %s' % path)
    return numbered_files(path, INPUT_PATTERN)


def select_frames(frames, first=None, last=None, default=None):
    """
    Frame numbers within [first, last]. Without bounds, `default` (or every
    frame) is used.
    """
    if first is None and last is None and default is not None:
        numbers = list(default)
    else:
        numbers = [
            number for number in sorted(frames)
            if (first is None or number >= first) and (last is None or number <= last)
        ]
    if not numbers:
        raise UsageError('The selected frame range holds no frames.')
    return numbers
