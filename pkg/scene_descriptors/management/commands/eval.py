# -*- coding: utf-8 -*-
import json

from scene_descriptors import settings as scene_settings
from scene_descriptors.descriptors import read_descriptor_set
from scene_descriptors.evaluation import BenchResult, evaluate, evaluate_routes, format_results_table, results_row
from scene_descriptors.exceptions import DatasetError
from scene_descriptors.probe import load_probe
from scene_descriptors.utils import read_bytes

from ._base import SceneCommand


class Command(SceneCommand):
    help = 'Scores a trained probe on the test part of a descriptor file'

    def add_command_arguments(self, parser):
        parser.add_argument('--probe', required=True, help='Probe checkpoint')
        parser.add_argument('--descriptors', required=True, help='Labelled descriptor file (with its .csv sidecar)')
        parser.add_argument('--split', help='Split file; its test_ids are scored (default: every descriptor)')
        parser.add_argument('--bar', type=float, default=scene_settings.SCENE_PASS_BAR,
                            help='Accuracy in percent a route must exceed to pass (default: %(default)s)')
        parser.add_argument('--per-route', dest='per_route', action='store_true',
                            help='Also report the accuracy of every route')
        parser.add_argument('--name', help='Descriptor name in the results table (default: the descriptor source)')
        parser.add_argument('--bench', help='Bench JSON whose timing fills the Compute Time column')
        parser.add_argument('--out', default='report.json', help='Report name (default: %(default)s)')

    def run(self, **options):
        probe = load_probe(options['probe'])
        descriptor_set = read_descriptor_set(options['descriptors'])
        if options['split']:
            descriptor_set = descriptor_set.subset(self.read_split(options['split']).test_ids)
        if not len(descriptor_set):
            raise DatasetError('No descriptors to evaluate.')

        report = evaluate(probe, descriptor_set)
        summary = report.to_dict()
        summary['passes'] = report.passes(options['bar'])
        if options['per_route']:
            summary['routes'] = evaluate_routes(probe, descriptor_set, options['bar'])

        bench = None
        if options['bench']:
            timing = json.loads(read_bytes(options['bench']).decode('utf-8'))
            bench = BenchResult(mean_us=timing['mean_us'], std_us=timing['std_us'], reps=timing['reps'],
                                descriptor_kind=timing['descriptor_kind'], dim=timing.get('dim', 0))
        row = results_row(options['name'] or descriptor_set.source, descriptor_set.source, descriptor_set.dim,
                          report.accuracy, bench)
        table = format_results_table([row])

        self.save_json(options['out'], summary)
        self.store.save(options['out'] + '.txt', table.encode('utf-8'))
        summary['table'] = table
        return summary
