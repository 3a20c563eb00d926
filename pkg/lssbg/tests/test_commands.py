import csv
import filecmp
import json
import logging
import os
import shutil
import tempfile
from io import StringIO

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from ..detect import DetectorConfig, detect_raw
from ..evaluation import load_dataset, load_ground_truth
from ..imaging import BinaryMask, StructuringElement, dilate, load_frame, load_mask, save_mask
from ..model import load_model
from ..postprocess import PostprocessConfig, postprocess


def run(*args, **options):
    out = StringIO()
    options.setdefault('verbosity', 0)
    call_command(*args, stdout=out, stderr=StringIO(), **options)
    return out.getvalue()


class CommandTestCase(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = tempfile.mkdtemp()
        cls.dataset = os.path.join(cls.tmp, 'synthetic')
        run(
            'fixtures', cls.dataset,
            train_frames=6, eval_frames=4, noise=0, image_format='png',
        )
        cls.video = os.path.join(cls.dataset, 'video1')
        cls.model = os.path.join(cls.tmp, 'video1.lssbgm')
        cls.train_output = run('train', cls.video, model=cls.model)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.tmp)
        super().tearDownClass()

    def setUp(self):
        self.work = tempfile.mkdtemp(dir=self.tmp)

    def assertExitCode(self, code, *args, **options):
        with self.assertRaises(CommandError) as cm:
            run(*args, **options)
        self.assertEqual(cm.exception.returncode, code)
        return cm.exception

    def write_perfect_masks(self, directory):
        os.makedirs(directory, exist_ok=True)
        sequence = load_dataset(self.video)
        for number, _, groundtruth in sequence.scored_pairs():
            mask = BinaryMask(load_ground_truth(groundtruth) == 255)
            save_mask(mask, os.path.join(directory, 'bin%06d.png' % number))


class FixturesCommandTestCase(CommandTestCase):
    def test_layout(self):
        self.assertEqual(len(os.listdir(os.path.join(self.video, 'input'))), 10)
        self.assertEqual(len(os.listdir(os.path.join(self.video, 'groundtruth'))), 10)
        with open(os.path.join(self.video, 'temporalROI.txt')) as fh:
            self.assertEqual(fh.read().split(), ['7', '10'])

    def test_square_too_large(self):
        self.assertExitCode(3, 'fixtures', self.work, size=8, square=16)


class TrainCommandTestCase(CommandTestCase):
    def test_model_file(self):
        model = load_model(self.model)
        self.assertEqual((model.width, model.height), (64, 64))

    def test_identical_frames_make_one_cluster(self):
        self.assertIn('Average cluster count 1.000', self.train_output)

    def test_empty_range(self):
        self.assertExitCode(1, 'train', self.video, model=os.path.join(self.work, 'm'), first=100)

    def test_missing_model_path(self):
        self.assertExitCode(1, 'train', self.video)

    def test_missing_input(self):
        self.assertExitCode(2, 'train', os.path.join(self.work, 'missing'), model=os.path.join(self.work, 'm'))

    def test_invalid_parameters(self):
        error = self.assertExitCode(1, 'train', self.video, model=os.path.join(self.work, 'm'), patch_size=4)
        self.assertIn('patch_size', str(error))

    def test_quiet_run_keeps_logger_at_warning(self):
        run('train', self.video, model=os.path.join(self.work, 'quiet.lssbgm'))
        self.assertEqual(logging.getLogger('lssbg').level, logging.WARNING)

    def test_verbose_run_enables_debug_logging(self):
        with self.assertLogs('lssbg', level='DEBUG') as logs:
            run('train', self.video, model=os.path.join(self.work, 'loud.lssbgm'), verbosity=2)
        self.assertTrue(any('[Train]' in line for line in logs.output))

    def test_training_is_deterministic(self):
        path = os.path.join(self.work, 'again.lssbgm')
        run('train', self.video, model=path)
        self.assertTrue(filecmp.cmp(path, self.model, shallow=False))

    def test_config_file(self):
        config = os.path.join(self.work, 'run.cfg')
        with open(config, 'w') as fh:
            fh.write('patch_size = 3\nregion_radius = 6\n')
        path = os.path.join(self.work, 'small.lssbgm')
        run('train', self.video, model=path, config=config, region_radius=5)
        params = load_model(path).params
        self.assertEqual((params.patch_size, params.region_radius), (3, 5))


class DetectCommandTestCase(CommandTestCase):
    def test_one_mask_per_frame(self):
        output = os.path.join(self.work, 'masks')
        run('detect', self.video, model=self.model, output=output)
        self.assertEqual(
            sorted(os.listdir(output)),
            ['bin%06d.png' % number for number in range(7, 11)],
        )

    def test_masks_match_library(self):
        output = os.path.join(self.work, 'masks')
        run('detect', self.video, model=self.model, output=output)
        model = load_model(self.model)
        expected = os.path.join(self.work, 'expected.png')
        for number in range(7, 11):
            frame = load_frame(os.path.join(self.video, 'input', 'in%06d.png' % number))
            mask = postprocess(detect_raw(frame, model, DetectorConfig()), frame, model, PostprocessConfig())
            save_mask(mask, expected)
            self.assertTrue(filecmp.cmp(expected, os.path.join(output, 'bin%06d.png' % number), shallow=False))

    def test_training_frame_is_background(self):
        output = os.path.join(self.work, 'masks')
        run('detect', self.video, model=self.model, output=output, first=1, last=1)
        self.assertEqual(load_mask(os.path.join(output, 'bin000001.png')).area, 0)

    def test_emitted_stages(self):
        output = os.path.join(self.work, 'masks')
        run(
            'detect', self.video, model=self.model, output=output,
            first=7, last=7, emit_raw_masks=True, emit_core_border=True,
        )
        self.assertEqual(
            sorted(os.listdir(output)),
            ['bin000007.png', 'border000007.png', 'core000007.png', 'raw000007.png'],
        )

    def test_border_band_uses_model_radius(self):
        model = os.path.join(self.work, 'r6.lssbgm')
        output = os.path.join(self.work, 'masks')
        run('train', self.video, model=model, region_radius=6)
        run(
            'detect', self.video, model=model, output=output,
            first=8, last=8, erode_radius=3, emit_core_border=True,
        )
        core = load_mask(os.path.join(output, 'core000008.png'))
        border = load_mask(os.path.join(output, 'border000008.png'))
        self.assertGreater(core.area, 0)
        self.assertGreater(border.area, 0)
        self.assertTrue(border <= dilate(core, StructuringElement.disk(6)))

    def test_workers_give_same_masks(self):
        serial = os.path.join(self.work, 'serial')
        parallel = os.path.join(self.work, 'parallel')
        run('detect', self.video, model=self.model, output=serial)
        run('detect', self.video, model=self.model, output=parallel, workers=3)
        match, mismatch, errors = filecmp.cmpfiles(serial, parallel, os.listdir(serial), shallow=False)
        self.assertEqual((len(match), mismatch, errors), (4, [], []))

    def test_dimension_mismatch(self):
        small = os.path.join(self.work, 'small')
        run('fixtures', small, size=32, square=8, train_frames=2, eval_frames=2, image_format='png')
        self.assertExitCode(
            3, 'detect', os.path.join(small, 'video1'),
            model=self.model, output=os.path.join(self.work, 'masks'),
        )

    def test_corrupt_model(self):
        path = os.path.join(self.work, 'corrupt.lssbgm')
        with open(path, 'wb') as fh:
            fh.write(b'garbage')
        self.assertExitCode(3, 'detect', self.video, model=path, output=os.path.join(self.work, 'masks'))


class EvaluateCommandTestCase(CommandTestCase):
    def test_perfect_masks(self):
        masks = os.path.join(self.work, 'masks')
        report = os.path.join(self.work, 'perfect.json')
        self.write_perfect_masks(masks)
        stdout = run('evaluate', self.video, masks=masks, report=report)
        self.assertIn('Overall F-measure 1.0000.', stdout)
        with open(report) as fh:
            data = json.load(fh)
        self.assertEqual(data['method'], 'perfect')
        self.assertEqual(data['overall']['metrics']['fmeasure'], 1.0)
        self.assertEqual(data['categories'][0]['name'], 'synthetic')
        self.assertTrue(os.path.isfile(os.path.join(self.work, 'perfect.csv')))

    def test_category_directory(self):
        masks = os.path.join(self.work, 'masks')
        self.write_perfect_masks(os.path.join(masks, 'video1'))
        report = os.path.join(self.work, 'report.json')
        run('evaluate', self.dataset, masks=masks, report=report, method='oracle')
        with open(report) as fh:
            data = json.load(fh)
        self.assertEqual(data['method'], 'oracle')
        self.assertEqual(data['categories'][0]['members'], ['video1'])

    def test_missing_mask(self):
        masks = os.path.join(self.work, 'masks')
        self.write_perfect_masks(masks)
        os.remove(os.path.join(masks, 'bin000008.png'))
        error = self.assertExitCode(
            3, 'evaluate', self.video, masks=masks, report=os.path.join(self.work, 'r.json'),
        )
        self.assertIn('frame 8', str(error))


class RankCommandTestCase(CommandTestCase):
    def test_two_reports(self):
        perfect = os.path.join(self.work, 'perfect')
        self.write_perfect_masks(perfect)
        empty = os.path.join(self.work, 'empty')
        os.makedirs(empty)
        for number in range(7, 11):
            save_mask(BinaryMask.empty((64, 64)), os.path.join(empty, 'bin%06d.png' % number))

        reports = []
        for name, masks in (('empty', empty), ('perfect', perfect)):
            reports.append(os.path.join(self.work, name + '.json'))
            run('evaluate', self.video, masks=masks, report=reports[-1])

        output = os.path.join(self.work, 'ranking.csv')
        stdout = run('rank', *reports, output=output)
        with open(output) as fh:
            rows = list(csv.DictReader(fh))
        self.assertEqual([row['method'] for row in rows], ['perfect', 'empty'])
        self.assertIn('1. perfect', stdout)

    def test_report_without_metrics(self):
        report = os.path.join(self.work, 'x.json')
        with open(report, 'w') as fh:
            json.dump({'method': 'x', 'categories': [], 'overall': {'name': 'overall'}}, fh)
        error = self.assertExitCode(3, 'rank', report, output=os.path.join(self.work, 'r.csv'))
        self.assertIn('metrics', str(error))

    def test_unknown_category(self):
        masks = os.path.join(self.work, 'masks')
        self.write_perfect_masks(masks)
        report = os.path.join(self.work, 'perfect.json')
        run('evaluate', self.video, masks=masks, report=report)
        self.assertExitCode(3, 'rank', report, output=os.path.join(self.work, 'r.csv'), category='thermal')


class RunCommandTestCase(CommandTestCase):
    def test_matches_separate_commands(self):
        composed = os.path.join(self.work, 'composed')
        run('run', self.dataset, workdir=composed, method='lss')

        separate = os.path.join(self.work, 'separate')
        model = os.path.join(separate, 'models', 'synthetic', 'video1.lssbgm')
        masks = os.path.join(separate, 'masks', 'synthetic', 'video1')
        os.makedirs(os.path.dirname(model))
        run('train', self.video, model=model)
        run('detect', self.video, model=model, output=masks)
        run('evaluate', self.dataset, masks=os.path.join(separate, 'masks'),
            report=os.path.join(separate, 'report.json'), method='lss')

        for relative in (
            os.path.join('models', 'synthetic', 'video1.lssbgm'),
            os.path.join('masks', 'synthetic', 'video1', 'bin000009.png'),
            'report.json',
            'report.csv',
        ):
            self.assertTrue(
                filecmp.cmp(os.path.join(composed, relative), os.path.join(separate, relative), shallow=False),
                relative,
            )
