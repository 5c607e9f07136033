# -*- coding: utf-8 -*-
import struct
from unittest.case import TestCase

import numpy as np

from scene_descriptors import constants
from scene_descriptors.checkpoints import deserialize_checkpoint, serialize_checkpoint
from scene_descriptors.exceptions import FormatError


class CheckpointTest(TestCase):
    def setUp(self):
        self.tensors = {
            'encoder.weights': np.arange(24, dtype=np.float32).reshape(2, 3, 2, 2),
            'encoder.bias': np.array([0.5, -1.5], dtype=np.float32),
            'scale': np.array(3.0, dtype=np.float32),
        }
        self.data = serialize_checkpoint(self.tensors, {'vae': {'latent_dim': 2}})

    def test_round_trip(self):
        tensors, config = deserialize_checkpoint(self.data, kind=constants.CHECKPOINT_KIND_VAE)

        assert list(tensors) == list(self.tensors)
        for name, array in self.tensors.items():
            assert tensors[name].dtype == np.float32
            assert tensors[name].tobytes() == array.tobytes()
            assert tensors[name].shape == array.shape
        assert config == {'vae': {'latent_dim': 2}, 'kind': 'vae'}

    def test_layout(self):
        magic, version, count = struct.unpack_from('<4sII', self.data)

        assert (magic, version, count) == (b'VAEC', 1, 3)

    def test_bad_magic(self):
        with self.assertRaises(FormatError):
            deserialize_checkpoint(b'VAEX' + self.data[4:])

    def test_bad_version(self):
        with self.assertRaises(FormatError):
            deserialize_checkpoint(self.data[:4] + struct.pack('<I', 2) + self.data[8:])

    def test_truncated(self):
        with self.assertRaises(FormatError):
            deserialize_checkpoint(self.data[:40])
        with self.assertRaises(FormatError):
            deserialize_checkpoint(self.data[:6])

    def test_kind_mismatch(self):
        with self.assertRaises(FormatError):
            deserialize_checkpoint(self.data, kind=constants.CHECKPOINT_KIND_PROBE)

    def test_deterministic(self):
        assert serialize_checkpoint(self.tensors, {'vae': {'latent_dim': 2}}) == self.data
