import os

from ...evaluation import read_report
from ...ranking import rank_methods, ranking_table_from_reports, write_ranking
from ...utils import UsageError
from ..base import PipelineCommand


class Command(PipelineCommand):
    help = 'Rank methods by their average per-metric rank across evaluation reports.'

    def add_arguments(self, parser):
        parser.add_argument('reports', nargs='+', help='JSON reports written by the evaluate command.')
        parser.add_argument('--output', help='CSV file to write the ranking to.')
        parser.add_argument('--category', help='Rank on this category instead of the overall metrics.')
        super().add_arguments(parser)

    def run(self, options):
        config = self.get_config(options, output=options['output'])
        if not config.output:
            raise UsageError('--output is required.')

        reports = []
        for path in options['reports']:
            report = read_report(path)
            if not report.get('method'):
                report['method'] = os.path.splitext(os.path.basename(path))[0]
            reports.append(report)

        ranking = rank_methods(ranking_table_from_reports(reports, options['category']))
        write_ranking(config.output, ranking)

        for position, method in enumerate(ranking.order, start=1):
            self.stdout.write('%d. %s (average rank %.3f)' % (position, method, ranking.average[method]))
        self.stdout.write('Wrote ranking to %s.' % config.output)
