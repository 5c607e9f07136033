# -*- coding: utf-8 -*-
import numpy as np

from scene_descriptors import constants
from scene_descriptors.descriptors import DescriptorSet, serialize_descriptor_set, sidecar_path
from scene_descriptors.vae import encode_many, load_vae

from ._base import SceneCommand


class Command(SceneCommand):
    help = 'Encodes the images of a manifest into VAE descriptors (posterior means)'

    def add_command_arguments(self, parser):
        parser.add_argument('--model', required=True, help='VAE checkpoint')
        parser.add_argument('--manifest', required=True, help='CSV manifest of the images to encode')
        parser.add_argument('--out', default='vae.dsc1', help='Descriptor file name (default: %(default)s)')

    def run(self, **options):
        model = load_vae(options['model'])
        samples = self.load_samples(options, image_size=model.config.image_size)
        codes = encode_many(samples, model, threads=options['threads'])

        descriptor_set = DescriptorSet(values=np.stack([code.z for code in codes]), source=constants.SOURCE_VAE,
                                       ids=[sample.id for sample in samples],
                                       labels=[sample.label for sample in samples],
                                       routes=[sample.route for sample in samples])
        data, sidecar = serialize_descriptor_set(descriptor_set)
        self.store.save(options['out'], data)
        self.store.save(sidecar_path(options['out']), sidecar)
        return {'descriptors': len(descriptor_set), 'dim': descriptor_set.dim}
