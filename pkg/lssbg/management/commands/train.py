import logging

from ...evaluation import is_video_dir, load_dataset
from ...imaging import load_frame
from ...model import TrainingState, finalize, save_model
from ...utils import UsageError
from ..base import LSS_FLAGS, PipelineCommand, numbered_frames, select_frames

logger = logging.getLogger('lssbg')


class Command(PipelineCommand):
    help = 'Train a background model from a range of frames and write it to a model file.'
    parameter_flags = LSS_FLAGS + (
        ('train_threshold', float, 'Descriptor distance under which a frame joins a cluster.'),
    )

    def add_arguments(self, parser):
        parser.add_argument(
            'input',
            nargs='?',
            help='Benchmark video directory, or a directory of in%%06d frames.',
        )
        parser.add_argument('--model', help='Model file to write.')
        parser.add_argument('--first', type=int, help='First training frame number.')
        parser.add_argument('--last', type=int, help='Last training frame number.')
        super().add_arguments(parser)

    def run(self, options):
        config = self.get_config(
            options,
            input=options['input'],
            model=options['model'],
            train_first=options['first'],
            train_last=options['last'],
        )
        if not config.input or not config.model:
            raise UsageError('Both an input directory and --model are required.')

        state = train_from_directory(config)
        model = finalize(state)
        save_model(model, config.model)

        counts = state.cluster_counts()
        self.stdout.write(
            'Trained on %d frame(s). Average cluster count %.3f, max %d.'
            % (state.frames_seen, counts.mean(), counts.max())
        )
        self.stdout.write('Wrote model to %s.' % config.model)


def train_from_directory(config):
    """
    Train on the configured frame range. Without bounds, a benchmark video
    trains on the frames before its temporal ROI.
    """
    frames = numbered_frames(config.input)
    default = load_dataset(config.input).training_frames if is_video_dir(config.input) else None
    numbers = select_frames(frames, config.train_first, config.train_last, default)

    state = None
    for number in numbers:
        frame = load_frame(frames[number])
        if state is None:
            state = TrainingState(
                frame.width,
                frame.height,
                params=config.lss_params,
                train_threshold=config.train_threshold,
            )
        state.update(frame)
    logger.info(
        '[Train] %(input)s: %(frames)d frame(s), %(slots)d cluster slot(s).'
        % {'input': config.input, 'frames': state.frames_seen, 'slots': state.slots}
    )
    return state
