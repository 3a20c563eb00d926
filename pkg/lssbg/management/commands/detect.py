import logging
import os
from concurrent.futures import ThreadPoolExecutor

from django.conf import settings

from ...detect import detect_raw
from ...evaluation import is_video_dir, load_dataset
from ...imaging import load_frame, save_mask
from ...model import load_model
from ...postprocess import run_postprocess
from ...utils import UsageError
from ..base import DETECT_FLAGS, PipelineCommand, numbered_frames, select_frames

logger = logging.getLogger('lssbg')


class Command(PipelineCommand):
    help = 'Detect foreground in a range of frames and write one mask per frame.'
    parameter_flags = DETECT_FLAGS

    def add_arguments(self, parser):
        parser.add_argument(
            'input',
            nargs='?',
            help='Benchmark video directory, or a directory of in%%06d frames.',
        )
        parser.add_argument('--model', help='Model file written by the train command.')
        parser.add_argument('--output', help='Directory for the bin%%06d.png masks.')
        parser.add_argument('--first', type=int, help='First frame number to process.')
        parser.add_argument('--last', type=int, help='Last frame number to process.')
        super().add_arguments(parser)

    def run(self, options):
        config = self.get_config(
            options,
            input=options['input'],
            model=options['model'],
            output=options['output'],
            detect_first=options['first'],
            detect_last=options['last'],
        )
        if not config.input or not config.model or not config.output:
            raise UsageError('An input directory, --model and --output are required.')

        written = detect_directory(config)
        self.stdout.write('Wrote %d mask(s) to %s.' % (written, config.output))


def detect_directory(config):
    """
    Detect every frame of the configured range. Without bounds, a benchmark
    video processes its temporal ROI. Returns the number of masks written.
    """
    model = load_model(config.model)
    postprocess_config = config.postprocess_for(model.params)
    frames = numbered_frames(config.input)
    default = load_dataset(config.input).evaluation_frames if is_video_dir(config.input) else None
    numbers = select_frames(frames, config.detect_first, config.detect_last, default)
    os.makedirs(config.output, exist_ok=True)

    def process(number):
        frame = load_frame(frames[number])
        raw = detect_raw(frame, model, config.detector)
        stages = run_postprocess(raw, frame, model, postprocess_config)
        outputs = [(settings.LSSBG_MASK_FILENAME, stages.final)]
        if config.emit_raw_masks:
            outputs.append((settings.LSSBG_RAW_MASK_FILENAME, raw))
        if config.emit_core_border:
            outputs.append((settings.LSSBG_CORE_MASK_FILENAME, stages.core))
            outputs.append((settings.LSSBG_BORDER_MASK_FILENAME, stages.border))
        for filename, mask in outputs:
            save_mask(mask, os.path.join(config.output, filename % number))
        logger.debug(
            '[Detect] Frame %(number)d: %(raw)d raw, %(final)d final foreground pixel(s).'
            % {'number': number, 'raw': raw.area, 'final': stages.final.area}
        )
        return number

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            done = list(executor.map(process, numbers))
    else:
        done = [process(number) for number in numbers]

    logger.info(
        '[Detect] %(input)s: %(frames)d frame(s) written to %(output)s.'
        % {'input': config.input, 'frames': len(done), 'output': config.output}
    )
    return len(done)
