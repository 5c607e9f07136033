# -*- coding: utf-8 -*-
import json
import logging

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from scene_descriptors import settings as scene_settings
from scene_descriptors.datasets import SplitSpec, load_samples
from scene_descriptors.exceptions import ConfigurationError, SceneDescriptorError
from scene_descriptors.models import get_training_run_model
from scene_descriptors.serializers import TrainingRunSerializer
from scene_descriptors.storage import get_artifact_store
from scene_descriptors.utils import dump_json, read_bytes

logger = logging.getLogger(__name__)

EXIT_RUNTIME_ERROR = 1
EXIT_USAGE_ERROR = 2


class SceneCommand(BaseCommand):
    """
    Base of the scene_descriptors commands. Subclasses implement ``add_command_arguments`` and ``run``; ``run``
      returns a dict which is printed to stdout as JSON together with the artifacts written through ``self.store``.
    """
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=0, help='Random seed (default: %(default)s)')
        parser.add_argument('--out-dir', default=scene_settings.SCENE_OUT_DIR,
                            help='Directory receiving every file written (default: %(default)s)')
        parser.add_argument('--threads', type=int, default=1, help='Worker threads (default: %(default)s)')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, **options):
        raise NotImplementedError('subclasses of SceneCommand must provide a run() method')

    def handle(self, *args, **options):
        if options['threads'] < 1:
            raise CommandError('--threads must be >= 1, got {}.'.format(options['threads']),
                               returncode=EXIT_USAGE_ERROR)
        self.store = get_artifact_store()(options['out_dir'])
        try:
            summary = self.run(**options)
        except serializers.ValidationError as e:
            raise CommandError('Invalid options: {}'.format(json.dumps(e.detail, sort_keys=True)),
                               returncode=EXIT_USAGE_ERROR)
        except ConfigurationError as e:
            raise CommandError(str(e), returncode=EXIT_USAGE_ERROR)
        except (SceneDescriptorError, IOError) as e:
            logger.debug('{} failed: {!r}'.format(self.__class__.__module__, e))
            raise CommandError(str(e), returncode=EXIT_RUNTIME_ERROR)

        summary = dict(summary or {})
        summary['artifacts'] = self.store.summary()
        self.stdout.write(dump_json(summary))

    def build_config(self, serializer_class, options):
        """
        Validates the options named like the serializer's fields and returns the configuration object
        """
        data = {name: options[name] for name in serializer_class().fields if options.get(name) is not None}
        serializer = serializer_class(data=data)
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def load_samples(self, options, image_size=None):
        return load_samples(options['manifest'], image_size=image_size, threads=options['threads'])

    def read_split(self, path):
        try:
            return SplitSpec.from_dict(json.loads(read_bytes(path).decode('utf-8')))
        except (ValueError, KeyError) as e:
            raise CommandError('{}: not a split file ({}).'.format(path, e), returncode=EXIT_RUNTIME_ERROR)

    def save_json(self, name, data):
        return self.store.save(name, (dump_json(data, indent=2) + '\n').encode('utf-8'))

    def create_run(self, kind, seed):
        """
        :return: a new TrainingRun when RECORD_RUNS is enabled, None otherwise
        """
        if not scene_settings.SCENE_RECORD_RUNS:
            return None
        return get_training_run_model().objects.create(kind=kind, seed=seed)

    def run_summary(self, run, checkpoint=None):
        if run is None:
            return None
        run.refresh_from_db()
        if checkpoint is not None:
            run.checkpoint_path = checkpoint.path
            run.save(update_fields=['checkpoint_path', 'modified'])
        return TrainingRunSerializer(run).data


def add_vae_arguments(parser):
    parser.add_argument('--image-size', dest='image_size', type=int, default=scene_settings.SCENE_IMAGE_SIZE,
                        help='Square input side in pixels (default: %(default)s)')
    parser.add_argument('--latent-dim', dest='latent_dim', type=int, default=scene_settings.SCENE_LATENT_DIM,
                        help='Latent (descriptor) dimension (default: %(default)s)')
    parser.add_argument('--channel-schedule', dest='channel_schedule', type=int, nargs='+',
                        default=list(scene_settings.SCENE_CHANNEL_SCHEDULE),
                        help='Encoder widths per downsampling block (default: %(default)s)')
    parser.add_argument('--variant', default=scene_settings.SCENE_VARIANT,
                        help='vanilla, dip or dip-ii (default: %(default)s)')
    parser.add_argument('--lambda-d', dest='lambda_d', type=float, default=scene_settings.SCENE_LAMBDA_D,
                        help='Weight of the diagonal covariance penalty (default: %(default)s)')
    parser.add_argument('--lambda-od', dest='lambda_od', type=float, default=scene_settings.SCENE_LAMBDA_OD,
                        help='Weight of the off-diagonal covariance penalty (default: %(default)s)')
    parser.add_argument('--recon-weight', dest='recon_weight', type=float, default=scene_settings.SCENE_RECON_WEIGHT,
                        help='Weight of the reconstruction term (default: %(default)s)')
    parser.add_argument('--slope', type=float, default=scene_settings.SCENE_LEAKY_RELU_SLOPE,
                        help='Leaky ReLU negative slope (default: %(default)s)')
    parser.add_argument('--mc-samples', dest='mc_samples', type=int, default=scene_settings.SCENE_MC_SAMPLES,
                        help='Reparameterized draws per image (default: %(default)s)')


def add_train_arguments(parser):
    parser.add_argument('--learning-rate', '--lr', dest='learning_rate', type=float,
                        default=scene_settings.SCENE_LEARNING_RATE, help='Adam step size (default: %(default)s)')
    parser.add_argument('--max-epochs', dest='max_epochs', type=int, default=scene_settings.SCENE_MAX_EPOCHS,
                        help='Epoch cap (default: %(default)s)')
    parser.add_argument('--patience', type=int, default=scene_settings.SCENE_PATIENCE,
                        help='Epochs without validation improvement before stopping (default: %(default)s)')
    parser.add_argument('--batch-size', dest='batch_size', type=int, default=scene_settings.SCENE_BATCH_SIZE,
                        help='Minibatch size (default: %(default)s)')
    parser.add_argument('--validation-fraction', dest='validation_fraction', type=float,
                        default=scene_settings.SCENE_VALIDATION_FRACTION,
                        help='Share of the images held out for early stopping (default: %(default)s)')


def add_phog_arguments(parser):
    parser.add_argument('--bins', type=int, default=scene_settings.SCENE_PHOG_BINS,
                        help='Orientation bins (default: %(default)s)')
    parser.add_argument('--levels', type=int, default=scene_settings.SCENE_PHOG_LEVELS,
                        help='Pyramid levels (default: %(default)s)')
    parser.add_argument('--orientation-range', dest='orientation_range', type=int,
                        default=scene_settings.SCENE_PHOG_ORIENTATION_RANGE,
                        help='180 (unsigned) or 360 (signed) degrees (default: %(default)s)')
