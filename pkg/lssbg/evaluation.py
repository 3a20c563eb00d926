"""
Scoring against change-detection ground truth.

A video directory follows the benchmark layout:

    input/in000001.jpg ...
    groundtruth/gt000001.png ...
    temporalROI.txt        "first last" evaluated frame numbers
    ROI.bmp (optional)     spatial region of interest, 0 = ignored

Frames before the temporal ROI are used for training.
"""
import csv
import json
import logging
import os
import re

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from .choices import GroundTruthLabels, MetricOrder
from .imaging import load_label_image, load_mask
from .utils import ArgumentError, FormatError, atomic_write

__all__ = [
    'CategoryReport',
    'ConfusionCounts',
    'MetricSet',
    'VideoReport',
    'VideoSequence',
    'aggregate_category',
    'aggregate_overall',
    'confusion',
    'evaluate_video',
    'find_videos',
    'load_dataset',
    'load_ground_truth',
    'metrics',
    'numbered_files',
    'read_report',
    'write_report',
]

logger = logging.getLogger('lssbg')

INPUT_PATTERN = re.compile(r'^in(\d+)\.(jpe?g|png)$', re.IGNORECASE)
GROUNDTRUTH_PATTERN = re.compile(r'^gt(\d+)\.(png|bmp)$', re.IGNORECASE)
ROI_FILENAMES = ('ROI.bmp', 'ROI.png')
METRIC_FIELDS = tuple(choice.name for choice in MetricOrder.all)
COUNT_FIELDS = ('tp', 'fp', 'fn', 'tn')


def numbered_files(directory, pattern):
    files = {}
    for name in os.listdir(directory):
        match = pattern.match(name)
        if match:
            files[int(match.group(1))] = os.path.join(directory, name)
    return files


class VideoSequence:
    """
    One benchmark video: numbered input frames, ground truth, the temporal
    ROI and an optional spatial ROI.
    """
    def __init__(self, root, inputs, groundtruth, roi_first, roi_last, spatial_roi_path=None):
        self.root = root
        self.name = os.path.basename(os.path.normpath(root))
        self.inputs = inputs
        self.groundtruth = groundtruth
        self.roi_first = roi_first
        self.roi_last = roi_last
        self.spatial_roi_path = spatial_roi_path

    @property
    def training_frames(self):
        return [n for n in sorted(self.inputs) if n < self.roi_first]

    @property
    def evaluation_frames(self):
        return [n for n in sorted(self.inputs) if self.roi_first <= n <= self.roi_last]

    def scored_pairs(self):
        """
        (frame number, input path, ground-truth path) for every evaluated
        frame.
        """
        pairs = []
        for number in self.evaluation_frames:
            if number not in self.groundtruth:
                raise FormatError(
                    'No ground truth for frame %d in %s.' % (number, self.root)
                )
            pairs.append((number, self.inputs[number], self.groundtruth[number]))
        return pairs

    def spatial_roi(self):
        """
        Boolean raster of scored pixels, or None when no ROI file exists.
        """
        if not self.spatial_roi_path:
            return None
        return load_label_image(self.spatial_roi_path) > 0

    def __repr__(self):
        return '<VideoSequence %s [%d-%d]>' % (self.name, self.roi_first, self.roi_last)


def load_dataset(root):
    input_dir = os.path.join(root, 'input')
    groundtruth_dir = os.path.join(root, 'groundtruth')
    roi_path = os.path.join(root, 'temporalROI.txt')
    for path in (input_dir, groundtruth_dir):
        if not os.path.isdir(path):
            raise FileNotFoundError('Missing directory: %s' % path)

    with open(roi_path) as fh:
        content = fh.read().split()
    try:
        roi_first, roi_last = (int(value) for value in content)
    except ValueError:
        raise FormatError(
            '%s must hold two integers, got %r.' % (roi_path, ' '.join(content))
        ) from None
    if roi_first < 1 or roi_last < roi_first:
        raise FormatError('%s holds an empty frame range.' % roi_path)

    spatial_roi_path = None
    for name in ROI_FILENAMES:
        if os.path.isfile(os.path.join(root, name)):
            spatial_roi_path = os.path.join(root, name)
            break

    sequence = VideoSequence(
        root=root,
        inputs=numbered_files(input_dir, INPUT_PATTERN),
        groundtruth=numbered_files(groundtruth_dir, GROUNDTRUTH_PATTERN),
        roi_first=roi_first,
        roi_last=roi_last,
        spatial_roi_path=spatial_roi_path,
    )
    logger.debug(
        '[Eval] Loaded %(video)s: %(train)d training, %(eval)d evaluated frame(s).'
        % {
            'video': sequence.name,
            'train': len(sequence.training_frames),
            'eval': len(sequence.evaluation_frames),
        }
    )
    return sequence


def is_video_dir(path):
    return os.path.isdir(os.path.join(path, 'input')) and os.path.isfile(
        os.path.join(path, 'temporalROI.txt')
    )


def find_videos(root):
    """
    A video directory yields itself; a category directory yields its video
    subdirectories in name order.
    """
    if is_video_dir(root):
        return [root]
    if not os.path.isdir(root):
        raise FileNotFoundError('Missing directory: %s' % root)
    videos = [
        os.path.join(root, name)
        for name in sorted(os.listdir(root))
        if is_video_dir(os.path.join(root, name))
    ]
    if not videos:
        raise FileNotFoundError('No benchmark videos found under %s' % root)
    return videos


def load_ground_truth(path):
    labels = load_label_image(path)
    invalid = ~np.isin(labels, GroundTruthLabels.values)
    if invalid.any():
        y, x = np.argwhere(invalid)[0]
        raise FormatError(
            'Invalid ground-truth label %d at (%d, %d) in %s. Expected one of: %s.'
            % (labels[y, x], x, y, path, ', '.join(
                '%d (%s)' % (label.value, label.verbose_value) for label in GroundTruthLabels.all
            ))
        )
    return labels


class ConfusionCounts:
    def __init__(self, tp=0, fp=0, fn=0, tn=0):
        if min(tp, fp, fn, tn) < 0:
            raise ArgumentError('Confusion counts must be >= 0.')
        self.tp = int(tp)
        self.fp = int(fp)
        self.fn = int(fn)
        self.tn = int(tn)

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    @property
    def as_dict(self):
        return {field: getattr(self, field) for field in COUNT_FIELDS}

    def __add__(self, other):
        return ConfusionCounts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.fn + other.fn,
            self.tn + other.tn,
        )

    def __eq__(self, other):
        if not isinstance(other, ConfusionCounts):
            return NotImplemented
        return self.as_dict == other.as_dict

    def __repr__(self):
        return 'ConfusionCounts(tp=%d, fp=%d, fn=%d, tn=%d)' % (self.tp, self.fp, self.fn, self.tn)


class MetricSet:
    def __init__(self, recall, specificity, fpr, fnr, pbc, precision, fmeasure):
        self.recall = recall
        self.specificity = specificity
        self.fpr = fpr
        self.fnr = fnr
        self.pbc = pbc
        self.precision = precision
        self.fmeasure = fmeasure

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ArgumentError('Metrics must be a mapping of name to value.')
        values = {}
        for field in METRIC_FIELDS:
            if field not in data:
                raise ArgumentError('Missing metric: %s' % field)
            try:
                values[field] = float(data[field])
            except (TypeError, ValueError):
                raise ArgumentError('Metric %s is not a number: %r' % (field, data[field])) from None
        return cls(**values)

    @property
    def as_dict(self):
        return {field: getattr(self, field) for field in METRIC_FIELDS}

    def __repr__(self):
        return 'MetricSet(%s)' % ', '.join(
            '%s=%.4f' % (field, value) for field, value in self.as_dict.items()
        )


def confusion(mask, gt, roi=None):
    """
    Tally a mask against a ground-truth label raster. OutsideROI and Unknown
    pixels, and pixels outside the optional spatial ROI, are not scored;
    HardShadow counts as background.
    """
    gt = np.asarray(gt)
    if mask.shape != gt.shape:
        raise ArgumentError(
            'Mask is %d×%d but the ground truth is %d×%d.'
            % (mask.width, mask.height, gt.shape[1], gt.shape[0])
        )
    if not np.isin(gt, GroundTruthLabels.values).all():
        raise FormatError('Ground truth holds values outside the label set.')

    positive = np.isin(gt, [label.value for label in GroundTruthLabels.positive])
    negative = np.isin(gt, [label.value for label in GroundTruthLabels.negative])
    if roi is not None:
        if roi.shape != gt.shape:
            raise ArgumentError('Spatial ROI and ground truth dimensions differ.')
        positive &= roi
        negative &= roi

    detected = mask.bits
    return ConfusionCounts(
        tp=np.count_nonzero(detected & positive),
        fp=np.count_nonzero(detected & negative),
        fn=np.count_nonzero(~detected & positive),
        tn=np.count_nonzero(~detected & negative),
    )


def _ratio(numerator, denominator):
    return numerator / denominator if denominator else 0.0


def metrics(c):
    recall = _ratio(c.tp, c.tp + c.fn)
    precision = _ratio(c.tp, c.tp + c.fp)
    return MetricSet(
        recall=recall,
        specificity=_ratio(c.tn, c.tn + c.fp),
        fpr=_ratio(c.fp, c.fp + c.tn),
        fnr=_ratio(c.fn, c.tp + c.fn),
        pbc=100.0 * _ratio(c.fn + c.fp, c.total),
        precision=precision,
        fmeasure=_ratio(2 * precision * recall, precision + recall),
    )


class VideoReport:
    """
    Counts pooled over every scored frame of one video.
    """
    def __init__(self, name, counts, frames=0):
        self.name = name
        self.counts = counts
        self.frames = frames
        self.metrics = metrics(counts)

    @property
    def as_dict(self):
        return {
            'name': self.name,
            'frames': self.frames,
            'counts': self.counts.as_dict,
            'metrics': self.metrics.as_dict,
        }


class CategoryReport:
    """
    Per-metric arithmetic mean over member reports.
    """
    def __init__(self, name, members, metric_set):
        self.name = name
        self.members = members
        self.metrics = metric_set

    @property
    def as_dict(self):
        return {
            'name': self.name,
            'members': [member.name for member in self.members],
            'metrics': self.metrics.as_dict,
        }


def _mean_metrics(reports):
    return MetricSet(**{
        field: float(np.mean([getattr(report.metrics, field) for report in reports]))
        for field in METRIC_FIELDS
    })


def aggregate_category(reports, name='category'):
    if not reports:
        raise ArgumentError('Cannot aggregate an empty list of video reports.')
    return CategoryReport(name, list(reports), _mean_metrics(reports))


def aggregate_overall(categories):
    if not categories:
        raise ArgumentError('Cannot aggregate an empty list of category reports.')
    return CategoryReport('overall', list(categories), _mean_metrics(categories))


def evaluate_video(sequence, mask_dir, mask_filename='bin%06d.png'):
    """
    Score the masks in mask_dir against every frame of the temporal ROI.
    A missing mask is a format error naming the frame.
    """
    roi = sequence.spatial_roi()
    total = ConfusionCounts()
    pairs = sequence.scored_pairs()
    for number, _, groundtruth_path in pairs:
        mask_path = os.path.join(mask_dir, mask_filename % number)
        if not os.path.isfile(mask_path):
            raise FormatError(
                'Missing mask for frame %d of %s: %s' % (number, sequence.name, mask_path)
            )
        total += confusion(load_mask(mask_path), load_ground_truth(groundtruth_path), roi)
    report = VideoReport(sequence.name, total, frames=len(pairs))
    logger.info(
        '[Eval] %(video)s: %(frames)d frame(s), F-measure %(f).4f.'
        % {'video': sequence.name, 'frames': len(pairs), 'f': report.metrics.fmeasure}
    )
    return report


def write_report(path, method, categories, overall=None):
    """
    Write the JSON report to path and a per-video CSV next to it
    (same name, .csv extension).
    """
    data = {
        'method': method,
        'categories': [
            {
                **category.as_dict,
                'videos': [video.as_dict for video in category.members],
            }
            for category in categories
        ],
        'overall': overall.as_dict if overall else None,
    }
    with atomic_write(path, 'w') as fh:
        json.dump(data, fh, cls=DjangoJSONEncoder, indent=2, sort_keys=True)
        fh.write('\n')

    csv_path = os.path.splitext(path)[0] + '.csv'
    with atomic_write(csv_path, 'w') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(('category', 'video', 'frames') + COUNT_FIELDS + METRIC_FIELDS)
        for category in categories:
            for video in category.members:
                writer.writerow(
                    (category.name, video.name, video.frames)
                    + tuple(video.counts.as_dict[field] for field in COUNT_FIELDS)
                    + tuple(repr(video.metrics.as_dict[field]) for field in METRIC_FIELDS)
                )
    return csv_path


def read_report(path):
    """
    Load a JSON report written by write_report.
    """
    with open(path) as fh:
        try:
            data = json.load(fh)
        except ValueError as ex:
            raise FormatError('%s is not a valid report: %s' % (path, ex)) from ex
    if not isinstance(data, dict) or 'categories' not in data:
        raise FormatError('%s is not a valid report.' % path)
    return data
