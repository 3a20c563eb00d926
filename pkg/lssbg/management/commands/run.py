import os

from django.core.management import call_command

from ...evaluation import find_videos
from ..base import DETECT_FLAGS, LSS_FLAGS, PipelineCommand
from .evaluate import category_name


class Command(PipelineCommand):
    help = (
        'Train, detect and evaluate every video under the given directories. '
        'Outputs match running the three commands one after another.'
    )
    parameter_flags = LSS_FLAGS + (
        ('train_threshold', float, 'Descriptor distance under which a frame joins a cluster.'),
    ) + DETECT_FLAGS

    def add_arguments(self, parser):
        parser.add_argument('inputs', nargs='+', help='Benchmark video or category directories.')
        parser.add_argument('--workdir', required=True, help='Directory for models, masks and the report.')
        parser.add_argument('--method', help='Method name stored in the report.')
        super().add_arguments(parser)

    def run(self, options):
        workdir = options['workdir']
        forwarded = {
            key: options[key]
            for key, _, _ in self.parameter_flags
            if options.get(key) is not None
        }
        common = {
            'config': options['config'],
            'verbosity': options['verbosity'],
            'stdout': self.stdout,
            'stderr': self.stderr,
        }
        train_keys = flag_keys(LSS_FLAGS) + ('train_threshold',)
        train_options = {key: value for key, value in forwarded.items() if key in train_keys}
        detect_options = {key: value for key, value in forwarded.items() if key in flag_keys(DETECT_FLAGS)}

        for path in options['inputs']:
            category = category_name(path)
            for video_path in find_videos(path):
                video = os.path.basename(os.path.normpath(video_path))
                model_path = os.path.join(workdir, 'models', category, video + '.lssbgm')
                mask_dir = os.path.join(workdir, 'masks', category, video)
                os.makedirs(os.path.dirname(model_path), exist_ok=True)

                call_command('train', video_path, model=model_path, **train_options, **common)
                call_command(
                    'detect', video_path, model=model_path, output=mask_dir,
                    **detect_options, **common,
                )

        call_command(
            'evaluate', *options['inputs'],
            masks=os.path.join(workdir, 'masks'),
            report=os.path.join(workdir, 'report.json'),
            method=options['method'] or os.path.basename(os.path.normpath(workdir)),
            **common,
        )


def flag_keys(flags):
    return tuple(key for key, _, _ in flags)
