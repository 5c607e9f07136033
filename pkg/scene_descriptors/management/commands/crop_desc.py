# -*- coding: utf-8 -*-
from scene_descriptors.descriptors import crop_descriptors, read_descriptor_set, serialize_descriptor_set, \
    sidecar_path

from ._base import SceneCommand


class Command(SceneCommand):
    help = 'Keeps the leading components of externally computed descriptors and L2-normalizes each row'

    def add_command_arguments(self, parser):
        parser.add_argument('--descriptors', required=True, help='Input descriptor file (with its .csv sidecar)')
        parser.add_argument('--dim', type=int, default=128, help='Components kept (default: %(default)s)')
        parser.add_argument('--out', default='cropped.dsc1', help='Descriptor file name (default: %(default)s)')

    def run(self, **options):
        source = read_descriptor_set(options['descriptors'])
        cropped = crop_descriptors(source, options['dim'])

        data, sidecar = serialize_descriptor_set(cropped)
        self.store.save(options['out'], data)
        self.store.save(sidecar_path(options['out']), sidecar)
        return {'descriptors': len(cropped), 'dim': cropped.dim, 'input_dim': source.dim}
