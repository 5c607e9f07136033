# -*- coding: utf-8 -*-
from scene_descriptors import settings as scene_settings
from scene_descriptors.descriptors import phog_set, serialize_descriptor_set, sidecar_path
from scene_descriptors.serializers import PhogConfigSerializer

from ._base import SceneCommand, add_phog_arguments


class Command(SceneCommand):
    help = 'Computes PHOG descriptors for the images of a manifest'

    def add_command_arguments(self, parser):
        parser.add_argument('--manifest', required=True, help='CSV manifest of the images')
        add_phog_arguments(parser)
        parser.add_argument('--image-size', dest='image_size', type=int, default=scene_settings.SCENE_BENCH_IMAGE_SIZE,
                            help='Images are resized to this side first, 0 keeps them as they are '
                                 '(default: %(default)s)')
        parser.add_argument('--out', default='phog.dsc1', help='Descriptor file name (default: %(default)s)')

    def run(self, **options):
        config = self.build_config(PhogConfigSerializer, options)
        samples = self.load_samples(options, image_size=options['image_size'] or None)
        descriptor_set = phog_set(samples, config, threads=options['threads'])

        data, sidecar = serialize_descriptor_set(descriptor_set)
        self.store.save(options['out'], data)
        self.store.save(sidecar_path(options['out']), sidecar)
        return {'descriptors': len(descriptor_set), 'dim': descriptor_set.dim}
