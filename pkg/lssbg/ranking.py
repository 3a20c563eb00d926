import csv

import numpy as np
from scipy.stats import rankdata

from .choices import MetricOrder
from .evaluation import MetricSet
from .utils import ArgumentError, FormatError, atomic_write

__all__ = [
    'MethodRanking',
    'rank_methods',
    'ranking_table_from_reports',
    'write_ranking',
]


class MethodRanking:
    """
    Per-metric ranks (1 = best, ties averaged), each method's average rank
    and the final ordering.
    """
    def __init__(self, ranks, average, order):
        self.ranks = ranks
        self.average = average
        self.order = order

    def __repr__(self):
        return '<MethodRanking %s>' % ', '.join(
            '%s=%.3f' % (method, self.average[method]) for method in self.order
        )


def rank_methods(table):
    """
    Rank methods given as {method: {metric: value}}. Higher is better for
    recall, specificity, precision and F-measure; lower is better for the
    rest.
    """
    methods = sorted(table)
    if not methods:
        raise ArgumentError('At least one method is needed for a ranking.')
    for method in methods:
        missing = [choice.name for choice in MetricOrder.all if choice.name not in table[method]]
        if missing:
            raise ArgumentError(
                'Method %s is missing metric(s): %s' % (method, ', '.join(missing))
            )

    ranks = {method: {} for method in methods}
    for choice in MetricOrder.all:
        try:
            values = np.array([float(table[method][choice.name]) for method in methods])
        except (TypeError, ValueError):
            raise ArgumentError('Metric %s must be numeric for every method.' % choice.name) from None
        if choice in MetricOrder.higher_is_better:
            values = -values
        for method, rank in zip(methods, rankdata(values, method='average')):
            ranks[method][choice.name] = float(rank)

    average = {
        method: sum(ranks[method].values()) / len(MetricOrder.all)
        for method in methods
    }
    order = sorted(methods, key=lambda method: (average[method], method))
    return MethodRanking(ranks, average, order)


def ranking_table_from_reports(reports, category=None):
    """
    Build a ranking table from loaded JSON reports. Uses each report's
    overall entry, or the named category.
    """
    table = {}
    for report in reports:
        method = report.get('method')
        if not method:
            raise FormatError('Report has no method name.')
        if method in table:
            raise FormatError('Method %s appears in more than one report.' % method)
        if category:
            entries = [
                c for c in report.get('categories') or ()
                if isinstance(c, dict) and c.get('name') == category
            ]
            if not entries:
                raise FormatError('Report for %s has no category %s.' % (method, category))
            entry = entries[0]
        else:
            entry = report.get('overall')
            if not isinstance(entry, dict):
                raise FormatError('Report for %s has no overall entry.' % method)
        if 'metrics' not in entry:
            raise FormatError('Report for %s has no metrics field.' % method)
        try:
            table[method] = MetricSet.from_dict(entry['metrics']).as_dict
        except ArgumentError as ex:
            raise FormatError('Report for %s: %s' % (method, ex)) from ex
    return table


def write_ranking(path, ranking):
    metric_names = [choice.name for choice in MetricOrder.all]
    with atomic_write(path, 'w') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(['position', 'method', 'average_rank'] + ['rank_' + name for name in metric_names])
        for position, method in enumerate(ranking.order, start=1):
            writer.writerow(
                [position, method, repr(ranking.average[method])]
                + [repr(ranking.ranks[method][name]) for name in metric_names]
            )
