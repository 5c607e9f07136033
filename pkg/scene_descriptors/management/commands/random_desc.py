# -*- coding: utf-8 -*-
from scene_descriptors.datasets import read_manifest
from scene_descriptors.descriptors import random_set, serialize_descriptor_set, sidecar_path
from scene_descriptors.exceptions import ConfigurationError
from scene_descriptors.rng import Rng

from ._base import SceneCommand


class Command(SceneCommand):
    help = 'Draws one seed-fixed random descriptor per manifest image (the trivial baseline)'

    def add_command_arguments(self, parser):
        parser.add_argument('--manifest', required=True, help='CSV manifest of the images')
        parser.add_argument('--dim', type=int, default=128, help='Descriptor length (default: %(default)s)')
        parser.add_argument('--out', default='random.dsc1', help='Descriptor file name (default: %(default)s)')

    def run(self, **options):
        if options['dim'] < 1:
            raise ConfigurationError('--dim must be >= 1, got {}.'.format(options['dim']))
        # Pixels are never looked at; the manifest rows carry everything needed
        rows = read_manifest(options['manifest'])
        descriptor_set = random_set(rows, options['dim'], Rng(options['seed']))

        data, sidecar = serialize_descriptor_set(descriptor_set)
        self.store.save(options['out'], data)
        self.store.save(sidecar_path(options['out']), sidecar)
        return {'descriptors': len(descriptor_set), 'dim': descriptor_set.dim}
