# -*- coding: utf-8 -*-
from scene_descriptors import settings as scene_settings
from scene_descriptors.synthetic import corpus_files, generate_synthetic_corpus

from ._base import SceneCommand


class Command(SceneCommand):
    help = 'Generates a procedural rural / suburban / urban corpus (PPM files plus a manifest)'

    def add_command_arguments(self, parser):
        parser.add_argument('--n', type=int, default=100, help='Images per class (default: %(default)s)')
        parser.add_argument('--size', type=int, default=scene_settings.SCENE_IMAGE_SIZE,
                            help='Square image side in pixels (default: %(default)s)')
        parser.add_argument('--manifest-name', default='manifest.csv', help='(default: %(default)s)')

    def run(self, **options):
        samples = generate_synthetic_corpus(options['n'], options['size'], options['seed'])
        for name, data in corpus_files(samples, options['manifest_name']):
            self.store.save(name, data)
        return {
            'images': len(samples),
            'manifest': self.store.path(options['manifest_name']),
        }
