# -*- coding: utf-8 -*-
from scene_descriptors import constants
from scene_descriptors import settings as scene_settings
from scene_descriptors.datasets import split_two_thirds
from scene_descriptors.descriptors import read_descriptor_set
from scene_descriptors.evaluation import evaluate
from scene_descriptors.exceptions import DatasetError
from scene_descriptors.probe import serialize_probe, train_probe
from scene_descriptors.serializers import ProbeConfigSerializer

from ._base import SceneCommand


class Command(SceneCommand):
    help = 'Trains the linear probe on the training part of a labelled descriptor file'

    def add_command_arguments(self, parser):
        parser.add_argument('--descriptors', required=True, help='Labelled descriptor file (with its .csv sidecar)')
        parser.add_argument('--split', help='Existing split file; by default a per-route split is drawn from --seed')
        parser.add_argument('--train-total', dest='train_total', type=int,
                            help='Exact number of training images, apportioned over the routes')
        parser.add_argument('--epochs', type=int, default=scene_settings.SCENE_PROBE_EPOCHS,
                            help='Full-batch epochs (default: %(default)s)')
        parser.add_argument('--learning-rate', '--lr', dest='learning_rate', type=float,
                            default=scene_settings.SCENE_PROBE_LEARNING_RATE,
                            help='Adam step size (default: %(default)s)')
        parser.add_argument('--hidden', type=int, default=scene_settings.SCENE_PROBE_HIDDEN,
                            help='Width of the first linear layer (default: %(default)s)')
        parser.add_argument('--out', default='probe.ckpt', help='Checkpoint name (default: %(default)s)')
        parser.add_argument('--split-out', dest='split_out', default='split.json',
                            help='Name of the split file written (default: %(default)s)')

    def run(self, **options):
        config = self.build_config(ProbeConfigSerializer, options)
        descriptor_set = read_descriptor_set(options['descriptors'])

        if options['split']:
            split = self.read_split(options['split'])
        else:
            rows = [{'id': identifier, 'route': route}
                    for identifier, route in zip(descriptor_set.ids, descriptor_set.routes)]
            split = split_two_thirds(rows, options['seed'], train_total=options['train_total'])
        self.save_json(options['split_out'], split.to_dict())

        train_set = descriptor_set.subset(split.train_ids)
        if not len(train_set):
            raise DatasetError('The split selects no training descriptors.')

        run = self.create_run(constants.RUN_KIND_PROBE, config.seed)
        model = train_probe(train_set, config=config, run=run)
        checkpoint = self.store.save(options['out'], serialize_probe(model, {
            'train': config.to_dict(), 'source': descriptor_set.source}))

        return {
            'train': len(train_set),
            'test': len(split.test_ids),
            'final_loss': model.history[-1],
            'train_report': evaluate(model, train_set).to_dict(),
            'run': self.run_summary(run, checkpoint),
        }
