# -*- coding: utf-8 -*-
import os

import numpy as np
import pytest

from scene_descriptors.rng import Rng
from scene_descriptors.vae import SceneVAE, TrainConfig, VaeConfig

_run_slow = pytest.mark.skipif(os.environ.get('SCENE_DESCRIPTORS_SLOW') != '1',
                               reason='set SCENE_DESCRIPTORS_SLOW=1 to run the long end-to-end runs')


def slow(test):
    return pytest.mark.slow(_run_slow(test))


def tiny_vae_config(**kwargs):
    values = dict(image_size=8, latent_dim=4, channel_schedule=(4, 8), variant='dip', lambda_d=50.0, lambda_od=5.0)
    values.update(kwargs)
    return VaeConfig(**values)


def tiny_train_config(**kwargs):
    values = dict(learning_rate=0.005, max_epochs=3, patience=3, batch_size=4, seed=0)
    values.update(kwargs)
    return TrainConfig(**values)


def tiny_vae(seed=0, **kwargs):
    return SceneVAE(tiny_vae_config(**kwargs), Rng(seed))


def random_images(count, size=8, seed=0):
    return Rng(seed).uniform((count, 3, size, size)).astype(np.float32)
