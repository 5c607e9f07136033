# -*- coding: utf-8 -*-
from scene_descriptors.datasets import encode_png, load_image, read_manifest, resize_bilinear
from scene_descriptors.exceptions import ConfigurationError
from scene_descriptors.vae import encode, latent_traverse, load_vae

from ._base import SceneCommand

DEFAULT_VALUES = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]


class Command(SceneCommand):
    help = 'Decodes an image\'s latent code while sweeping one latent dimension'

    def add_command_arguments(self, parser):
        parser.add_argument('--model', required=True, help='VAE checkpoint')
        parser.add_argument('--image', help='Image file to start from')
        parser.add_argument('--manifest', help='Manifest to take the start image from (with --index)')
        parser.add_argument('--index', type=int, default=0,
                            help='Manifest row of the start image (default: %(default)s)')
        parser.add_argument('--dim', type=int, default=0, help='Latent dimension to sweep (default: %(default)s)')
        parser.add_argument('--values', type=float, nargs='+', default=DEFAULT_VALUES,
                            help='Values given to that dimension (default: %(default)s)')
        parser.add_argument('--out', default='traverse.png', help='Image strip name (default: %(default)s)')

    def run(self, **options):
        if bool(options['image']) == bool(options['manifest']):
            raise ConfigurationError('Give exactly one of --image and --manifest.')
        path = options['image']
        if options['manifest']:
            rows = read_manifest(options['manifest'])
            if not 0 <= options['index'] < len(rows):
                raise ConfigurationError('--index {} out of range [0, {}).'.format(options['index'], len(rows)))
            path = rows[options['index']]['path']

        model = load_vae(options['model'])
        image = resize_bilinear(load_image(path), model.config.image_size)
        code = encode(image, model)
        strip = latent_traverse(code.z, options['dim'], options['values'], model)
        self.store.save(options['out'], encode_png(strip))
        return {'image': path, 'dim': options['dim'], 'values': options['values'], 'z': code.z}
