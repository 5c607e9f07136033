# -*- coding: utf-8 -*-
from scene_descriptors import constants
from scene_descriptors.datasets import encode_png, split_two_thirds
from scene_descriptors.exceptions import DatasetError
from scene_descriptors.serializers import TrainConfigSerializer, VaeConfigSerializer
from scene_descriptors.vae import reconstruction_grid, serialize_vae, train_vae

from ._base import SceneCommand, add_train_arguments, add_vae_arguments


class Command(SceneCommand):
    help = 'Trains the scene VAE on the images of a manifest and writes its checkpoint and loss history'

    def add_command_arguments(self, parser):
        parser.add_argument('--manifest', required=True, help='CSV manifest of the training images')
        parser.add_argument('--split', help='Split file; only its train_ids are used')
        parser.add_argument('--train-total', dest='train_total', type=int,
                            help='Without --split: exact number of training images, apportioned over the routes')
        parser.add_argument('--all-images', dest='all_images', action='store_true',
                            help='Train on every manifest image instead of the training partition')
        add_vae_arguments(parser)
        add_train_arguments(parser)
        parser.add_argument('--out', default='vae.ckpt', help='Checkpoint name (default: %(default)s)')
        parser.add_argument('--reconstructions', type=int, default=8,
                            help='Images in the reconstruction sheet, 0 to skip it (default: %(default)s)')

    def run(self, **options):
        vae_config = self.build_config(VaeConfigSerializer, options)
        train_config = self.build_config(TrainConfigSerializer, options)

        samples = self.load_samples(options, image_size=vae_config.image_size)
        # Without --split this draws the same per-route partition as train_probe for the same seed
        if options['split']:
            split = self.read_split(options['split'])
        elif not options['all_images']:
            split = split_two_thirds(samples, options['seed'], train_total=options['train_total'])
        else:
            split = None
        if split is not None:
            train_ids = set(split.train_ids)
            samples = [sample for sample in samples if sample.id in train_ids]
            if not samples:
                raise DatasetError('The split selects none of the manifest images.')

        run = self.create_run(constants.RUN_KIND_VAE, train_config.seed)
        result = train_vae(samples, vae_config, train_config, run=run)

        checkpoint = self.store.save(options['out'], serialize_vae(result.model, {'train': train_config.to_dict()}))
        history = [record.to_dict() for record in result.history]
        self.save_json(options['out'] + '.history.json', history)
        if options['reconstructions'] > 0:
            grid = reconstruction_grid(samples[:options['reconstructions']], result.model)
            self.store.save(options['out'] + '.reconstructions.png', encode_png(grid))

        summary = result.to_dict()
        summary['images'] = len(samples)
        summary['run'] = self.run_summary(run, checkpoint)
        return summary
