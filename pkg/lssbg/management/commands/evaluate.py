import os

from django.conf import settings

from ...choices import MetricOrder
from ...evaluation import (
    aggregate_category,
    aggregate_overall,
    evaluate_video,
    find_videos,
    is_video_dir,
    load_dataset,
    write_report,
)
from ...utils import UsageError
from ..base import PipelineCommand


class Command(PipelineCommand):
    help = (
        'Score detection masks against ground truth and write a JSON report '
        'with a per-video CSV next to it.'
    )

    def add_arguments(self, parser):
        parser.add_argument(
            'inputs',
            nargs='*',
            help='Benchmark video or category directories.',
        )
        parser.add_argument(
            '--masks',
            help='Mask directory: holds bin%%06d.png directly, or one subdirectory per video.',
        )
        parser.add_argument('--report', help='JSON report to write.')
        parser.add_argument('--method', help='Method name stored in the report (default: report file name).')
        super().add_arguments(parser)

    def run(self, options):
        config = self.get_config(
            options,
            report=options['report'],
            method=options['method'],
        )
        inputs = options['inputs'] or ([config.input] if config.input else [])
        masks = options['masks'] or config.output
        if not inputs or not masks or not config.report:
            raise UsageError('At least one input directory, --masks and --report are required.')
        method = config.method or os.path.splitext(os.path.basename(config.report))[0]

        categories, overall = evaluate_inputs(inputs, masks, config.report, method)
        for category in categories:
            self.stdout.write(
                '%s: %s %.4f over %d video(s).'
                % (category.name, MetricOrder.fmeasure.verbose_value, category.metrics.fmeasure, len(category.members))
            )
        self.stdout.write('Overall %s %.4f.' % (MetricOrder.fmeasure.verbose_value, overall.metrics.fmeasure))
        self.stdout.write('Wrote report to %s.' % config.report)


def mask_dir_for(masks, category, video, single):
    """
    Masks of a video live in masks/<category>/<video>, masks/<video>, or,
    when only one video is scored, directly in masks.
    """
    for candidate in (os.path.join(masks, category, video), os.path.join(masks, video)):
        if os.path.isdir(candidate):
            return candidate
    if single:
        return masks
    raise FileNotFoundError('No mask directory for video %s under %s' % (video, masks))


def evaluate_inputs(inputs, masks, report_path, method):
    """
    Score every video under the given directories; each input directory is
    one category. Returns (categories, overall) after writing the report.
    """
    groups = [(category_name(path), find_videos(path)) for path in inputs]
    single = sum(len(videos) for _, videos in groups) == 1

    categories = []
    for name, videos in groups:
        reports = []
        for video_path in videos:
            sequence = load_dataset(video_path)
            mask_dir = mask_dir_for(masks, name, sequence.name, single)
            reports.append(evaluate_video(sequence, mask_dir, settings.LSSBG_MASK_FILENAME))
        categories.append(aggregate_category(reports, name))

    overall = aggregate_overall(categories)
    write_report(report_path, method, categories, overall)
    return categories, overall


def category_name(path):
    """
    A category directory names itself; a lone video takes its parent's name.
    """
    path = os.path.abspath(path)
    if is_video_dir(path):
        return os.path.basename(os.path.dirname(path)) or 'category'
    return os.path.basename(path)
