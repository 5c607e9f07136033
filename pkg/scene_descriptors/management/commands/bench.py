# -*- coding: utf-8 -*-
from scene_descriptors import constants
from scene_descriptors.evaluation import BENCH_KINDS, bench_descriptor
from scene_descriptors.exceptions import ConfigurationError
from scene_descriptors.rng import Rng
from scene_descriptors.serializers import BenchConfigSerializer, PhogConfigSerializer
from scene_descriptors import settings as scene_settings
from scene_descriptors.vae import load_vae

from ._base import SceneCommand, add_phog_arguments


class Command(SceneCommand):
    help = 'Measures the time to compute one descriptor from an in-memory, already resized image'

    def add_command_arguments(self, parser):
        parser.add_argument('--kind', required=True, choices=BENCH_KINDS, help='Descriptor to time')
        parser.add_argument('--manifest', required=True, help='CSV manifest of the images')
        parser.add_argument('--model', help='VAE checkpoint (for --kind vae)')
        parser.add_argument('--limit', type=int, default=10, help='Images timed per pass (default: %(default)s)')
        parser.add_argument('--dim', type=int, default=128, help='Random descriptor length (default: %(default)s)')
        parser.add_argument('--reps', type=int, default=scene_settings.SCENE_BENCH_REPS,
                            help='Timed passes, at least 30 (default: %(default)s)')
        parser.add_argument('--warmup', type=int, default=scene_settings.SCENE_BENCH_WARMUP,
                            help='Untimed calls before timing (default: %(default)s)')
        parser.add_argument('--image-size', dest='image_size', type=int,
                            default=scene_settings.SCENE_BENCH_IMAGE_SIZE,
                            help='Image side for phog and random; vae uses its own input size (default: %(default)s)')
        parser.add_argument('--median-of-means', dest='median_of_means', action='store_true',
                            help='Report the median of group means instead of the plain mean')
        add_phog_arguments(parser)
        parser.add_argument('--out', help='Result name (default: bench_<kind>.json)')

    def run(self, **options):
        config = self.build_config(BenchConfigSerializer, options)
        phog_config = self.build_config(PhogConfigSerializer, options)
        if options['limit'] < 1:
            raise ConfigurationError('--limit must be >= 1, got {}.'.format(options['limit']))

        model = None
        image_size = config.image_size
        if options['kind'] == constants.SOURCE_VAE:
            if not options['model']:
                raise ConfigurationError('--kind vae needs --model.')
            model = load_vae(options['model'])
            image_size = model.config.image_size

        images = self.load_samples(options, image_size=image_size)[:options['limit']]
        result = bench_descriptor(options['kind'], images, reps=config.reps, warmup=config.warmup,
                                  median_of_means=config.median_of_means, model=model, phog_config=phog_config,
                                  dim=options['dim'], rng=Rng(options['seed']))

        summary = result.to_dict()
        summary['images'] = len(images)
        summary['image_size'] = image_size
        self.save_json(options['out'] or 'bench_{}.json'.format(options['kind']), summary)
        return summary
