# -*- coding: utf-8 -*-
import os
import tempfile
from unittest.case import TestCase

import numpy as np

from scene_descriptors import constants
from scene_descriptors.descriptors import DescriptorSet
from scene_descriptors.exceptions import DatasetError, FormatError, ShapeError
from scene_descriptors.probe import ProbeConfig, ProbeModel, load_probe, logits_of, predict, predict_many, \
    serialize_probe, train_probe
from scene_descriptors.rng import Rng
from scene_descriptors.utils import write_bytes_to_file
from scene_descriptors.vae import serialize_vae

from tests.tests.helpers import tiny_vae


def blobs(per_class=30, dim=8, seed=0):
    rng = Rng(seed)
    centers = 5.0 * np.eye(3, dim)
    values = np.concatenate([center + 0.3 * rng.normal((per_class, dim)) for center in centers])
    labels = np.repeat(np.arange(3), per_class)
    return values.astype(np.float32), labels


class ProbeTest(TestCase):
    def test_separable_blobs(self):
        values, labels = blobs()

        model = train_probe(values, labels, ProbeConfig(epochs=300, learning_rate=0.05))

        assert (predict_many(model, values) == labels).all()
        assert model.history[-1] < model.history[0]
        assert len(model.history) == 300

    def test_descriptor_set_input(self):
        values, labels = blobs(per_class=10)
        descriptor_set = DescriptorSet(values=values, source=constants.SOURCE_EXTERNAL, labels=labels.tolist())

        model = train_probe(descriptor_set, config=ProbeConfig(epochs=5))

        assert model.dim == 8 and model.hidden == 3 and model.classes == 3

    def test_seeded(self):
        values, labels = blobs(per_class=10)
        config = ProbeConfig(epochs=20, seed=4)

        first = train_probe(values, labels, config)
        second = train_probe(values, labels, config)

        assert np.array_equal(first.layer1.weights.data, second.layer1.weights.data)
        assert first.history == second.history

    def test_affine_equivalence(self):
        model = ProbeModel(16, hidden=3, rng=Rng(2))
        values = Rng(3).normal((5, 16))

        weights, bias = model.affine()

        assert weights.shape == (3, 16)
        assert np.allclose(logits_of(model, values), values.astype(np.float64) @ weights.T + bias, atol=1e-4)

    def test_zero_weights_predict_first_class(self):
        model = ProbeModel(4, rng=Rng(0))
        for parameter in model.parameters():
            parameter.data[...] = 0.0

        prediction = predict(model, np.array([1.0, -2.0, 3.0, 0.5]))

        assert prediction.label == constants.RURAL
        assert not prediction.logits.any()

    def test_invalid_training_data(self):
        values, labels = blobs(per_class=4)

        with self.assertRaises(DatasetError):
            train_probe(values[labels != constants.URBAN], labels[labels != constants.URBAN])
        with self.assertRaises(ShapeError):
            train_probe(values, labels[:-1])
        with self.assertRaises(DatasetError):
            train_probe(DescriptorSet(values=values, source=constants.SOURCE_EXTERNAL))

    def test_dimension_mismatch(self):
        with self.assertRaises(ShapeError):
            predict(ProbeModel(4, rng=Rng(0)), np.zeros(5))

    def test_save_and_load(self):
        values, labels = blobs(per_class=5)
        model = train_probe(values, labels, ProbeConfig(epochs=3))

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'probe.ckpt')
            write_bytes_to_file(path, serialize_probe(model, extra={'source': 'external'}))
            loaded = load_probe(path)

            write_bytes_to_file(os.path.join(directory, 'vae.ckpt'), serialize_vae(tiny_vae()))
            with self.assertRaises(FormatError):
                load_probe(os.path.join(directory, 'vae.ckpt'))

        assert np.array_equal(logits_of(loaded, values), logits_of(model, values))
