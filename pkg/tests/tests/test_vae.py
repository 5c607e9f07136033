# -*- coding: utf-8 -*-
import math
import os
import tempfile
from unittest.case import TestCase

import numpy as np

from scene_descriptors import constants, nn
from scene_descriptors import tensor as T
from scene_descriptors.exceptions import ConfigurationError, DatasetError, ShapeError
from scene_descriptors.rng import Rng
from scene_descriptors.synthetic import generate_synthetic_corpus
from scene_descriptors.utils import write_bytes_to_file
from scene_descriptors.vae import EarlyStopping, SceneVAE, TrainConfig, VaeConfig, decode, dip_penalty, encode, \
    encode_many, gradient_check, kl_standard_normal, latent_traverse, load_vae, make_batches, reconstruction_grid, \
    serialize_vae, split_validation, train_vae, vae_loss

from tests.tests.helpers import random_images, slow, tiny_train_config, tiny_vae, tiny_vae_config


class IdentityAutoencoder(object):
    """
    Encodes every image to mu = 0, logvar = 0 and decodes any latent back to the last encoded batch
    """
    config = tiny_vae_config(variant=constants.VARIANT_VANILLA)

    def encode_batch(self, x):
        self.x = x
        zeros = np.zeros((x.shape[0], self.config.latent_dim), np.float32)
        return T.Tensor(zeros), T.Tensor(zeros.copy())

    def decode_batch(self, z):
        return self.x


class VaeConfigTest(TestCase):
    def test_defaults(self):
        config = VaeConfig()

        assert config.latent_dim == 128
        assert config.channel_schedule == (32, 64, 128, 256, 512)
        assert config.encoder_widths == (32, 64, 128, 256, 512)
        assert config.feature_size == 2

    def test_larger_images_add_blocks(self):
        config = VaeConfig(image_size=128)

        assert config.encoder_widths == (32, 64, 128, 256, 512, 512)
        assert config.feature_size == 2

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            VaeConfig(image_size=48)
        with self.assertRaises(ConfigurationError):
            VaeConfig(image_size=16)
        with self.assertRaises(ConfigurationError):
            VaeConfig(variant='beta')
        with self.assertRaises(ConfigurationError):
            VaeConfig(lambda_d=-1.0)

    def test_dict_round_trip(self):
        config = tiny_vae_config(variant=constants.VARIANT_DIP_II)

        assert VaeConfig.from_dict(config.to_dict()) == config

    def test_train_config(self):
        config = TrainConfig()
        assert (config.learning_rate, config.patience, config.max_epochs) == (0.005, 100, 500)

        with self.assertRaises(ConfigurationError):
            TrainConfig(max_epochs=10, patience=11)
        with self.assertRaises(ConfigurationError):
            TrainConfig(batch_size=1)
        with self.assertRaises(ConfigurationError):
            TrainConfig(learning_rate=0.0)


class SceneVaeTest(TestCase):
    def setUp(self):
        self.model = tiny_vae()
        self.images = random_images(5)

    def test_encode(self):
        code = encode(self.images[0], self.model)

        assert code.mu.shape == code.logvar.shape == (4,)
        assert np.array_equal(code.z, code.mu)
        # Deterministic and mode-preserving
        assert np.array_equal(encode(self.images[0], self.model).z, code.z)
        assert self.model.mode == nn.TRAIN

    def test_encode_wrong_size(self):
        with self.assertRaises(ShapeError):
            encode(random_images(1, size=16)[0], self.model)

    def test_encode_many_matches_encode(self):
        codes = encode_many(self.images, self.model, threads=2)

        assert len(codes) == 5
        for image, code in zip(self.images, codes):
            assert np.allclose(encode(image, self.model).z, code.z, atol=1e-6)

    def test_decode(self):
        image = decode(np.zeros(4, np.float32), self.model)

        assert image.shape == (3, 8, 8)
        assert image.min() >= 0.0 and image.max() <= 1.0

        with self.assertRaises(ShapeError):
            decode(np.zeros(5), self.model)

    def test_latent_traverse(self):
        z = encode(self.images[0], self.model).z

        strip = latent_traverse(z, 1, [-1.0, 0.0, 1.0], self.model)

        assert strip.shape == (3, 8, 24)
        # The middle tile decodes z with dimension 1 set to 0
        expected = z.copy()
        expected[1] = 0.0
        assert np.allclose(strip[:, :, 8:16], decode(expected, self.model), atol=1e-6)

        with self.assertRaises(ConfigurationError):
            latent_traverse(z, 4, [0.0], self.model)

    def test_reconstruction_grid(self):
        grid = reconstruction_grid(self.images[:3], self.model)

        assert grid.shape == (3, 16, 24)
        assert np.array_equal(grid[:, :8, :8], self.images[0])

    def test_same_seed_same_weights(self):
        first = tiny_vae(seed=1).state_dict()
        second = tiny_vae(seed=1).state_dict()

        assert sorted(first) == sorted(second)
        assert all(np.array_equal(first[name], second[name]) for name in first)
        assert not np.array_equal(tiny_vae(seed=2).state_dict()['mu_head.weights'], first['mu_head.weights'])


class KlTest(TestCase):
    def test_zero_at_standard_normal(self):
        assert kl_standard_normal(T.Tensor(np.zeros((3, 4))), T.Tensor(np.zeros((3, 4)))).item() == 0.0

    def test_closed_form(self):
        kl = kl_standard_normal(T.Tensor([0.0]), T.Tensor([math.log(4.0)])).item()

        assert abs(kl - 0.5 * (4.0 - 1.0 - math.log(4.0))) < 1e-6
        assert abs(kl - 0.8069) < 1e-4

    def test_batch_average(self):
        mu = T.Tensor(np.array([[1.0, 0.0], [0.0, 0.0]]))
        logvar = T.Tensor(np.zeros((2, 2)))

        # 0.5 * 1 summed over dimensions, averaged over two rows
        assert kl_standard_normal(mu, logvar).item() == 0.25

    def test_monte_carlo(self):
        rng = Rng(21)
        signs = np.where(rng.uniform(20) < 0.5, -1.0, 1.0)
        mus = signs * (1.0 + rng.uniform(20))
        logvars = 2.0 * rng.uniform(20) - 1.0
        for index, (mu, logvar) in enumerate(zip(mus, logvars)):
            closed_form = kl_standard_normal(T.Tensor([mu]), T.Tensor([logvar])).item()

            # Antithetic pairs: E_q[log q(z) - log p(z)] with z = mu + sigma * eps
            eps = rng.spawn('pair-{}'.format(index)).normal(500000, dtype=np.float64)
            eps = np.concatenate([eps, -eps])
            z = mu + math.exp(0.5 * logvar) * eps
            estimate = np.mean(-0.5 * eps ** 2 - 0.5 * logvar + 0.5 * z ** 2)

            assert abs(estimate - closed_form) < 0.01 * closed_form

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            kl_standard_normal(T.Tensor(np.zeros(3)), T.Tensor(np.zeros(4)))


class DipPenaltyTest(TestCase):
    def test_identity_covariance(self):
        mu = T.Tensor(np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]))

        assert dip_penalty(mu, 50.0, 5.0).item() <= 1e-9

    def test_diagonal_term(self):
        mu = T.Tensor(2.0 * np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]))

        # Covariance 4 I: two diagonal entries off by 3
        assert abs(dip_penalty(mu, 50.0, 5.0).item() - 50.0 * 2 * 9.0) < 1e-9

    def test_off_diagonal_term(self):
        mu = T.Tensor(np.array([[1.0, 1.0], [-1.0, -1.0]]))

        # Covariance [[1, 1], [1, 1]]
        assert abs(dip_penalty(mu, 50.0, 5.0).item() - 5.0 * 2.0) < 1e-9

    def test_type_two_adds_mean_variance(self):
        mu = T.Tensor(np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]))
        logvar = T.Tensor(np.zeros((4, 2)))

        # Covariance I + I
        assert abs(dip_penalty(mu, 50.0, 5.0, logvar=logvar).item() - 50.0 * 2.0) < 1e-9

    def test_brute_force_oracle(self):
        values = Rng(22).normal((8, 4), dtype=np.float64)
        means = [sum(values[row, column] for row in range(8)) / 8.0 for column in range(4)]
        covariance = [[sum((values[row, i] - means[i]) * (values[row, j] - means[j]) for row in range(8)) / 8.0
                       for j in range(4)] for i in range(4)]
        expected = sum(5.0 * covariance[i][j] ** 2 for i in range(4) for j in range(4) if i != j) + \
            sum(50.0 * (covariance[i][i] - 1.0) ** 2 for i in range(4))

        assert abs(dip_penalty(T.Tensor(values), 50.0, 5.0).item() - expected) <= 1e-6 * max(1.0, expected)

    def test_permutation_invariant(self):
        values = Rng(23).normal((6, 3), dtype=np.float64)

        first = dip_penalty(T.Tensor(values), 50.0, 5.0).item()
        second = dip_penalty(T.Tensor(values[::-1].copy()), 50.0, 5.0).item()

        assert abs(first - second) < 1e-9

    def test_needs_two_rows(self):
        with self.assertRaises(ShapeError):
            dip_penalty(T.Tensor(np.ones((1, 3))), 50.0, 5.0)


class VaeLossTest(TestCase):
    def test_breakdown(self):
        model = tiny_vae()
        x = random_images(4)

        breakdown = vae_loss(x, model, Rng(0))

        assert breakdown.kl >= 0.0 and breakdown.dip >= 0.0
        assert abs(breakdown.total - (breakdown.recon + breakdown.kl + breakdown.dip)) < 1e-3 * breakdown.total

    def test_vanilla_has_no_penalty(self):
        breakdown = vae_loss(random_images(4), tiny_vae(variant=constants.VARIANT_VANILLA), Rng(0))

        assert breakdown.dip == 0.0

    def test_single_row_skips_penalty(self):
        model = tiny_vae().eval()

        assert vae_loss(random_images(1), model, Rng(0)).dip == 0.0

    def test_mc_samples_average(self):
        model = tiny_vae().eval()
        x = random_images(2)

        single = vae_loss(x, model, Rng(0), mc_samples=1).recon
        averaged = vae_loss(x, model, Rng(0), mc_samples=4).recon

        assert averaged > 0.0 and single > 0.0
        assert averaged != single

    def test_perfect_reconstruction(self):
        breakdown = vae_loss(random_images(3), IdentityAutoencoder(), Rng(0))

        assert (breakdown.recon, breakdown.kl, breakdown.dip, breakdown.total) == (0.0, 0.0, 0.0, 0.0)

    def test_finite_differences(self):
        # Slope 1 keeps the loss smooth everywhere
        model = tiny_vae(seed=4, slope=1.0)
        names = ['encoder_convs.0.weights', 'encoder_norms.1.gamma', 'encoder_norms.1.beta', 'mu_head.weights',
                 'logvar_head.bias', 'decoder_input.weights', 'decoder_convs.0.weights', 'decoder_norms.0.gamma',
                 'decoder_norms.0.beta', 'output_layer.weights']

        assert gradient_check(model, random_images(2, seed=4), names, seed=3) < 1e-3
        # The checked copy leaves the model untouched
        assert model.mu_head.weights.dtype == np.float32

    def test_finite_differences_unknown_parameter(self):
        with self.assertRaises(ConfigurationError):
            gradient_check(tiny_vae(), random_images(2), ['encoder_convs.7.weights'])


class EarlyStoppingTest(TestCase):
    def run_schedule(self, losses, patience):
        stopper = EarlyStopping(patience)
        for epoch, loss in enumerate(losses, start=1):
            stopper.update(epoch, loss)
            if stopper.should_stop(epoch):
                return epoch, stopper.best_epoch
        return len(losses), stopper.best_epoch

    def test_stops_at_best_plus_patience(self):
        losses = [5.0, 4.0, 3.0, 3.5, 3.2, 3.1, 3.0, 2.9, 2.8]

        # A tie does not count as an improvement
        assert self.run_schedule(losses, 3) == (6, 3)

    def test_strictly_improving_runs_to_the_end(self):
        losses = [10.0 - epoch for epoch in range(8)]

        assert self.run_schedule(losses, 2) == (8, 8)


class TrainingHelpersTest(TestCase):
    def test_make_batches_merges_single_tail(self):
        batches = make_batches(np.arange(9), 4)

        assert [len(batch) for batch in batches] == [4, 5]
        assert sorted(np.concatenate(batches).tolist()) == list(range(9))

    def test_split_validation(self):
        train, validation = split_validation(20, 0.1, Rng(0))

        assert len(validation) == 2 and len(train) == 18
        assert not set(train) & set(validation)

        with self.assertRaises(DatasetError):
            split_validation(2, 0.1, Rng(0))


class TrainVaeTest(TestCase):
    def test_train(self):
        images = random_images(12)

        result = train_vae(images, tiny_vae_config(), tiny_train_config(max_epochs=4, patience=2))

        assert 1 <= result.epochs_run <= 4
        assert [record.epoch for record in result.history] == list(range(1, result.epochs_run + 1))
        best = min(record.validation_loss for record in result.history)
        assert result.best_validation_loss == best
        assert result.history[result.best_epoch - 1].validation_loss == best
        assert result.model.mode == nn.EVAL

    def test_reconstruction_improves(self):
        corpus = generate_synthetic_corpus(10, 8, seed=0)

        result = train_vae(corpus, tiny_vae_config(), tiny_train_config(max_epochs=8, patience=8))

        assert result.epochs_run == 8
        assert result.history[-1].recon < result.history[0].recon

    def test_restores_best_epoch(self):
        images = random_images(10)
        validation = random_images(3, seed=1)
        train_config = tiny_train_config(max_epochs=5, patience=5, learning_rate=0.05)

        result = train_vae(images, tiny_vae_config(), train_config, validation=validation)

        with T.no_grad():
            breakdown = vae_loss(validation, result.model, Rng(train_config.seed).spawn('validation'))
        assert abs(breakdown.total - result.best_validation_loss) < 1e-5 * max(1.0, abs(breakdown.total))

    def test_deterministic(self):
        images = random_images(10)

        first = train_vae(images, tiny_vae_config(), tiny_train_config())
        second = train_vae(images, tiny_vae_config(), tiny_train_config())

        assert serialize_vae(first.model) == serialize_vae(second.model)
        assert first.to_dict() == second.to_dict()

    def test_empty(self):
        with self.assertRaises(DatasetError):
            train_vae([], tiny_vae_config(), tiny_train_config())

    def test_checkpoint_round_trip(self):
        model = train_vae(random_images(8), tiny_vae_config(), tiny_train_config(max_epochs=1, patience=1)).model
        image = random_images(1, seed=9)[0]

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'vae.ckpt')
            data = serialize_vae(model, {'train': {'seed': 0}})
            write_bytes_to_file(path, data)
            loaded = load_vae(path)

        assert data == serialize_vae(loaded, {'train': {'seed': 0}})
        assert loaded.config == model.config
        assert np.array_equal(encode(image, loaded).z, encode(image, model).z)

    @slow
    def test_default_architecture(self):
        model = SceneVAE(VaeConfig(image_size=64), Rng(0))
        codes = encode_many(random_images(4, size=64), model)

        assert len(codes) == 4 and codes[0].z.shape == (128,)
