# -*- coding: utf-8 -*-
"""
Convolutional variational autoencoder whose posterior means serve as global scene descriptors.

The encoder is a stack of stride-2 ``conv -> batchnorm -> leaky relu`` blocks followed by two linear heads producing
the posterior mean and log-variance; the decoder mirrors it with transposed convolutions and ends in a sigmoid.
"""
import contextlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import constants
from . import nn
from . import signals
from . import tensor as T
from .checkpoints import load_checkpoint, serialize_checkpoint
from .datasets import tile_grid
from .exceptions import ConfigurationError, DatasetError, NumericError, ShapeError, TrainingError
from .optim import Adam
from .rng import Rng
from .settings import (
    SCENE_ADAM_BETA1, SCENE_ADAM_BETA2, SCENE_ADAM_EPSILON, SCENE_BATCH_SIZE, SCENE_CHANNEL_SCHEDULE,
    SCENE_IMAGE_SIZE, SCENE_LAMBDA_D, SCENE_LAMBDA_OD, SCENE_LATENT_DIM, SCENE_LEAKY_RELU_SLOPE,
    SCENE_LEARNING_RATE, SCENE_MAX_EPOCHS, SCENE_MC_SAMPLES, SCENE_PATIENCE, SCENE_RECON_WEIGHT,
    SCENE_VALIDATION_FRACTION, SCENE_VARIANT)

logger = logging.getLogger(__name__)

CHANNELS = 3

# Rows per forward pass when encoding many images
ENCODE_CHUNK = 32


def _is_power_of_two(value):
    return value >= 1 and value & (value - 1) == 0


@dataclass
class VaeConfig:
    image_size: int = SCENE_IMAGE_SIZE
    latent_dim: int = SCENE_LATENT_DIM
    channel_schedule: Tuple[int, ...] = SCENE_CHANNEL_SCHEDULE
    variant: str = SCENE_VARIANT
    lambda_d: float = SCENE_LAMBDA_D
    lambda_od: float = SCENE_LAMBDA_OD
    recon_weight: float = SCENE_RECON_WEIGHT
    slope: float = SCENE_LEAKY_RELU_SLOPE
    mc_samples: int = SCENE_MC_SAMPLES

    def __post_init__(self):
        self.channel_schedule = tuple(int(width) for width in self.channel_schedule)
        if self.latent_dim < 1:
            raise ConfigurationError('latent_dim must be >= 1, got {}.'.format(self.latent_dim))
        if not self.channel_schedule or min(self.channel_schedule) < 1:
            raise ConfigurationError('channel_schedule must list positive widths.')
        if not _is_power_of_two(self.image_size) or self.image_size < 2 ** len(self.channel_schedule):
            raise ConfigurationError('image_size must be a power of two >= {}, got {}.'.format(
                2 ** len(self.channel_schedule), self.image_size))
        if self.variant not in constants.VARIANTS:
            raise ConfigurationError('Unknown variant "{}" (expected one of {}).'.format(
                self.variant, ', '.join(constants.VARIANTS)))
        if self.lambda_d < 0 or self.lambda_od < 0:
            raise ConfigurationError('DIP weights must be non-negative.')
        if self.mc_samples < 1:
            raise ConfigurationError('mc_samples must be >= 1, got {}.'.format(self.mc_samples))

    @property
    def encoder_widths(self):
        """
        Channel widths of the encoder blocks. Images larger than the schedule's native size get extra blocks of the
          last width so the final feature map is 2x2 (128x128 inputs add one block to the default schedule).
        """
        extra = max(0, int(np.log2(self.image_size)) - len(self.channel_schedule) - 1)
        return self.channel_schedule + (self.channel_schedule[-1],) * extra

    @property
    def feature_size(self):
        return self.image_size // 2 ** len(self.encoder_widths)

    def to_dict(self):
        data = asdict(self)
        data['channel_schedule'] = list(self.channel_schedule)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(**{key: value for key, value in data.items() if key in cls.__dataclass_fields__})


@dataclass
class TrainConfig:
    learning_rate: float = SCENE_LEARNING_RATE
    max_epochs: int = SCENE_MAX_EPOCHS
    patience: int = SCENE_PATIENCE
    batch_size: int = SCENE_BATCH_SIZE
    seed: int = 0
    beta1: float = SCENE_ADAM_BETA1
    beta2: float = SCENE_ADAM_BETA2
    epsilon: float = SCENE_ADAM_EPSILON
    validation_fraction: float = SCENE_VALIDATION_FRACTION

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigurationError('learning_rate must be positive, got {}.'.format(self.learning_rate))
        if self.max_epochs < 1:
            raise ConfigurationError('max_epochs must be >= 1, got {}.'.format(self.max_epochs))
        if not 1 <= self.patience <= self.max_epochs:
            raise ConfigurationError('patience must lie in [1, max_epochs], got {}.'.format(self.patience))
        if self.batch_size < 2:
            raise ConfigurationError('batch_size must be >= 2 (batch normalization), got {}.'.format(
                self.batch_size))
        if not 0.0 < self.validation_fraction < 1.0:
            raise ConfigurationError('validation_fraction must lie in (0, 1), got {}.'.format(
                self.validation_fraction))

    def to_dict(self):
        return asdict(self)


@dataclass
class LatentCode:
    mu: np.ndarray
    logvar: np.ndarray
    z: np.ndarray


@dataclass
class LossBreakdown:
    recon: float
    kl: float
    dip: float
    total: float
    objective: Optional[T.Tensor] = field(default=None, repr=False, compare=False)

    def to_dict(self):
        return {'recon': self.recon, 'kl': self.kl, 'dip': self.dip, 'total': self.total}


class SceneVAE(nn.Module):
    def __init__(self, config=None, rng=None):
        self.config = config = config or VaeConfig()
        rng = (rng or Rng(0)).spawn('init')
        slope = config.slope
        widths = config.encoder_widths
        features = widths[-1] * config.feature_size ** 2

        in_ch = CHANNELS
        self.encoder_convs = []
        self.encoder_norms = []
        for width in widths:
            self.encoder_convs.append(nn.Conv2dLayer(in_ch, width, 3, stride=2, padding=1, rng=rng, slope=slope))
            self.encoder_norms.append(nn.BatchNorm2dLayer(width))
            in_ch = width
        self.mu_head = nn.LinearLayer(features, config.latent_dim, rng=rng, slope=slope)
        self.logvar_head = nn.LinearLayer(features, config.latent_dim, rng=rng, slope=slope)

        self.decoder_input = nn.LinearLayer(config.latent_dim, features, rng=rng, slope=slope)
        self.decoder_convs = []
        self.decoder_norms = []
        for in_width, out_width in zip(widths[:0:-1], widths[-2::-1]):
            self.decoder_convs.append(
                nn.ConvTranspose2dLayer(in_width, out_width, 4, stride=2, padding=1, rng=rng, slope=slope))
            self.decoder_norms.append(nn.BatchNorm2dLayer(out_width))
        self.output_layer = nn.ConvTranspose2dLayer(widths[0], CHANNELS, 4, stride=2, padding=1, rng=rng, slope=slope)

    def encode_batch(self, x):
        """
        :param Tensor x: [N, 3, S, S]
        :return tuple: (mu, logvar), each [N, latent_dim]
        """
        x = T.as_tensor(x)
        size = self.config.image_size
        if x.ndim != 4 or x.shape[1:] != (CHANNELS, size, size):
            raise ShapeError('encode: expected images of shape [N, {}, {}, {}], got {}.'.format(
                CHANNELS, size, size, x.shape))
        h = x
        for conv, norm in zip(self.encoder_convs, self.encoder_norms):
            h = nn.leaky_relu(norm(conv(h)), self.config.slope)
        h = T.reshape(h, (x.shape[0], h.size // x.shape[0]))
        return self.mu_head(h), self.logvar_head(h)

    def decode_batch(self, z):
        """
        :param Tensor z: [N, latent_dim]
        :return Tensor: [N, 3, S, S] with values in [0, 1]
        """
        z = T.as_tensor(z)
        if z.ndim != 2 or z.shape[1] != self.config.latent_dim:
            raise ShapeError('decode: expected latents of shape [N, {}], got {}.'.format(
                self.config.latent_dim, z.shape))
        widths = self.config.encoder_widths
        side = self.config.feature_size
        h = T.reshape(self.decoder_input(z), (z.shape[0], widths[-1], side, side))
        for conv, norm in zip(self.decoder_convs, self.decoder_norms):
            h = nn.leaky_relu(norm(conv(h)), self.config.slope)
        return nn.sigmoid(self.output_layer(h))


@contextlib.contextmanager
def inference(model):
    """
    Puts ``model`` in eval mode with recording disabled, restoring its previous mode afterwards
    """
    previous = model.mode
    model.eval()
    try:
        with T.no_grad():
            yield model
    finally:
        if previous == nn.TRAIN:
            model.train()


def _as_image_batch(images, dtype=np.float32):
    if isinstance(images, np.ndarray):
        return images.astype(dtype, copy=False)
    return np.stack([getattr(image, 'pixels', image) for image in images]).astype(dtype, copy=False)


def encode(image, model):
    """
    Deterministic posterior of one image; the descriptor is the posterior mean.

    :param numpy.ndarray image: [3, S, S] pixels in [0, 1]
    :param SceneVAE model:
    :return LatentCode:
    """
    image = np.asarray(getattr(image, 'pixels', image))
    if image.ndim != 3:
        raise ShapeError('encode: expected one [3, S, S] image, got shape {}.'.format(image.shape))
    with inference(model):
        mu, logvar = model.encode_batch(T.Tensor(image[None].astype(model.mu_head.weights.dtype)))
    mu, logvar = mu.data[0], logvar.data[0]
    return LatentCode(mu=mu, logvar=logvar, z=mu.copy())


def encode_many(images, model, threads=1):
    """
    Encodes images in fixed-size chunks, optionally fanned out over a thread pool. Output order matches input order
      and does not depend on the thread count.

    :param images: [N, 3, S, S] array or sequence of images / ImageSamples
    :param SceneVAE model:
    :param int threads:
    :return list: LatentCode per image
    """
    batch = _as_image_batch(images, model.mu_head.weights.dtype)
    chunks = [batch[start:start + ENCODE_CHUNK] for start in range(0, len(batch), ENCODE_CHUNK)]

    def run(chunk):
        with T.no_grad():
            mu, logvar = model.encode_batch(T.Tensor(chunk))
        return [LatentCode(mu=m, logvar=lv, z=m.copy()) for m, lv in zip(mu.data, logvar.data)]

    with inference(model):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run, chunks))
        else:
            results = [run(chunk) for chunk in chunks]
    return [code for chunk in results for code in chunk]


def decode(z, model):
    """
    :param z: [latent_dim] vector
    :param SceneVAE model:
    :return numpy.ndarray: [3, S, S] image in [0, 1]
    """
    z = np.asarray(z)
    if z.shape != (model.config.latent_dim,):
        raise ShapeError('decode: expected a latent vector of length {}, got shape {}.'.format(
            model.config.latent_dim, z.shape))
    with inference(model):
        out = model.decode_batch(T.Tensor(z[None].astype(model.mu_head.weights.dtype)))
    return out.data[0]


def kl_standard_normal(mu, logvar):
    """
    KL(N(mu, exp(logvar)) || N(0, I)) summed over latent dimensions and averaged over the batch

    :param Tensor mu: [N, D] (or [D] for a single row)
    :param Tensor logvar: same shape as mu
    :return Tensor: scalar
    """
    mu, logvar = T.as_tensor(mu), T.as_tensor(logvar)
    if mu.shape != logvar.shape:
        raise ShapeError('kl_standard_normal: shapes {} and {} differ.'.format(mu.shape, logvar.shape))
    rows = mu.shape[0] if mu.ndim > 1 else 1
    terms = T.square(mu) + T.exp(logvar) - logvar - 1.0
    return T.sum(terms) * (0.5 / rows)


def dip_penalty(mu, lambda_d, lambda_od, logvar=None):
    """
    Moment-matching penalty pushing the covariance of the posterior means towards the identity:
      lambda_od * sum_{i != j} Cov_ij^2 + lambda_d * sum_i (Cov_ii - 1)^2, with the population covariance over the
      batch. When ``logvar`` is given the mean posterior variance is added to the diagonal first (type II).

    :param Tensor mu: [N, D], N >= 2
    :param float lambda_d:
    :param float lambda_od:
    :param Tensor logvar: Optional [N, D]
    :return Tensor: scalar
    """
    mu = T.as_tensor(mu)
    if mu.ndim != 2 or mu.shape[0] < 2:
        raise ShapeError('dip_penalty: needs a batch of at least 2 rows, got shape {}.'.format(mu.shape))
    rows, dims = mu.shape
    centered = mu - T.mean(mu, axis=0)
    covariance = T.matmul(T.transpose(centered), centered) * (1.0 / rows)

    eye = np.eye(dims, dtype=mu.dtype)
    if logvar is not None:
        covariance = covariance + T.Tensor(eye) * T.mean(T.exp(logvar), axis=0)

    off_diagonal = T.sum(T.square(covariance * T.Tensor(1.0 - eye)))
    diagonal = T.sum(T.square(covariance * T.Tensor(eye) - T.Tensor(eye)))
    return off_diagonal * float(lambda_od) + diagonal * float(lambda_d)


def vae_loss(x, model, rng, mc_samples=None):
    """
    Negative evidence lower bound with a unit-variance Gaussian likelihood, plus the DIP penalty for the dip variants.

    recon is the squared error summed over pixels and averaged over the batch (and over ``mc_samples`` reparameterized
    draws); the DIP penalty needs at least two rows and is 0 for smaller batches.

    :param x: [N, 3, S, S] batch
    :param SceneVAE model:
    :param Rng rng: Source of the reparameterization noise
    :param int mc_samples: Defaults to the model configuration
    :return LossBreakdown:
    """
    config = model.config
    x = T.as_tensor(x)
    samples = mc_samples or config.mc_samples
    rows = x.shape[0]

    mu, logvar = model.encode_batch(x)
    recon = None
    for _ in range(samples):
        eps = rng.normal(mu.shape, dtype=mu.dtype)
        x_hat = model.decode_batch(nn.reparameterize(mu, logvar, eps))
        term = T.sum(T.square(x_hat - x)) * (1.0 / rows)
        recon = term if recon is None else recon + term
    if samples > 1:
        recon = recon * (1.0 / samples)

    kl = kl_standard_normal(mu, logvar)
    objective = recon * float(config.recon_weight) + kl

    dip = 0.0
    if config.variant != constants.VARIANT_VANILLA and rows >= 2:
        penalty = dip_penalty(mu, config.lambda_d, config.lambda_od,
                              logvar=logvar if config.variant == constants.VARIANT_DIP_II else None)
        objective = objective + penalty
        dip = penalty.item()

    return LossBreakdown(recon=recon.item(), kl=kl.item(), dip=dip, total=objective.item(), objective=objective)


def gradient_check(model, images, parameter_names=(), seed=0, epsilon=1e-4):
    """
    Finite-difference check of the ``vae_loss`` gradients, run on a 64-bit copy of ``model`` in the same mode.

    Every evaluation redraws the reparameterization noise from ``seed``, so the loss is a deterministic function of the
    checked tensors. Use a slope of 1 (``VaeConfig.slope``) to keep the loss smooth everywhere.

    :param SceneVAE model:
    :param images: [N, 3, S, S] batch, N >= 2 in train mode
    :param parameter_names: names from ``model.named_parameters()`` checked along with the input batch
    :param int seed:
    :param float epsilon:
    :return float: max relative error, as computed by ``tensor.finite_difference_check``
    """
    shadow = SceneVAE(model.config)
    shadow.load_state_dict(model.state_dict())
    if model.mode == nn.TRAIN:
        shadow.train()
    else:
        shadow.eval()
    shadow.astype(np.float64)

    parameters = dict(shadow.named_parameters())
    unknown = [name for name in parameter_names if name not in parameters]
    if unknown:
        raise ConfigurationError('gradient_check: unknown parameter(s) {}.'.format(', '.join(unknown)))

    def loss(x, *weights):
        return vae_loss(x, shadow, Rng(seed)).objective

    x = T.Tensor(_as_image_batch(images, np.float64))
    return T.finite_difference_check(loss, [x] + [parameters[name] for name in parameter_names], epsilon=epsilon)


class EarlyStopping(object):
    """
    Tracks the best validation loss. An epoch improves only when its loss is strictly lower than the best so far;
      training stops once ``patience`` epochs have passed since the best one.
    """

    def __init__(self, patience):
        self.patience = patience
        self.best_loss = float('inf')
        self.best_epoch = None

    def update(self, epoch, loss):
        """
        :return bool: Whether this epoch is the new best
        """
        if loss < self.best_loss:
            self.best_loss = loss
            self.best_epoch = epoch
            return True
        return False

    def should_stop(self, epoch):
        return self.best_epoch is not None and epoch - self.best_epoch >= self.patience


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    validation_loss: float
    recon: float
    kl: float
    dip: float

    def to_dict(self):
        return asdict(self)


@dataclass
class TrainingResult:
    model: SceneVAE = field(repr=False)
    history: List[EpochRecord]
    best_epoch: int
    best_validation_loss: float
    stopped_early: bool

    @property
    def epochs_run(self):
        return len(self.history)

    def to_dict(self):
        return {
            'best_epoch': self.best_epoch,
            'best_validation_loss': self.best_validation_loss,
            'stopped_early': self.stopped_early,
            'epochs_run': self.epochs_run,
            'history': [record.to_dict() for record in self.history],
        }


def make_batches(order, batch_size):
    """
    Splits an index order into batches of ``batch_size``; a trailing batch of one is merged into its predecessor so
      batch normalization always sees at least two rows.
    """
    batches = [order[start:start + batch_size] for start in range(0, len(order), batch_size)]
    if len(batches) > 1 and len(batches[-1]) == 1:
        batches[-2] = np.concatenate([batches[-2], batches.pop()])
    return batches


def split_validation(count, fraction, rng):
    """
    :return tuple: (train indices, validation indices), seed-fixed
    """
    order = rng.permutation(count)
    n_validation = max(1, int(round(fraction * count)))
    if count - n_validation < 2:
        raise DatasetError('Need at least 2 training images after holding out {} for validation, got {} images.'.format(
            n_validation, count))
    return np.sort(order[n_validation:]), np.sort(order[:n_validation])


def train_vae(images, vae_config=None, train_config=None, validation=None, run=None):
    """
    Trains a SceneVAE with Adam and early stopping on the validation loss.

    :param images: [N, 3, S, S] array or sequence of images / ImageSamples
    :param VaeConfig vae_config:
    :param TrainConfig train_config:
    :param validation: Optional explicit validation images; defaults to a seed-fixed hold-out of ``images``
    :param run: Optional TrainingRun receiving lifecycle signals
    :return TrainingResult: the model carries the weights of the best validation epoch
    """
    vae_config = vae_config or VaeConfig()
    train_config = train_config or TrainConfig()
    data = _as_image_batch(images) if len(images) else np.zeros((0,), np.float32)
    if data.shape[0] == 0:
        raise DatasetError('Cannot train on an empty dataset.')

    rng = Rng(train_config.seed)
    if validation is None:
        train_index, validation_index = split_validation(len(data), train_config.validation_fraction,
                                                         rng.spawn('split'))
        train_data, validation_data = data[train_index], data[validation_index]
    else:
        train_data, validation_data = data, _as_image_batch(validation)
        if len(train_data) < 2 or len(validation_data) < 1:
            raise DatasetError('Need at least 2 training and 1 validation image.')

    model = SceneVAE(vae_config, rng)
    optimizer = Adam(model.parameters(), lr=train_config.learning_rate, beta1=train_config.beta1,
                     beta2=train_config.beta2, epsilon=train_config.epsilon)
    shuffle_rng = rng.spawn('shuffle')
    noise_rng = rng.spawn('noise')
    stopper = EarlyStopping(train_config.patience)
    history = []
    best_state = model.state_dict()
    stopped_early = False

    signals.training_started.send(sender=SceneVAE, run=run, config={
        'vae': vae_config.to_dict(), 'train': train_config.to_dict()})
    logger.info('train_vae: {} training / {} validation images, variant {}'.format(
        len(train_data), len(validation_data), vae_config.variant))

    try:
        for epoch in range(1, train_config.max_epochs + 1):
            model.train()
            total = 0.0
            for batch_number, batch in enumerate(make_batches(shuffle_rng.permutation(len(train_data)),
                                                              train_config.batch_size)):
                try:
                    breakdown = vae_loss(train_data[batch], model, noise_rng)
                except NumericError as e:
                    raise TrainingError('Non-finite loss at epoch {}, batch {}: {}'.format(epoch, batch_number, e))
                T.backward(breakdown.objective)
                optimizer.step()
                optimizer.zero_grad()
                total += breakdown.total * len(batch)

            with inference(model):
                validation_breakdown = vae_loss(validation_data, model, Rng(train_config.seed).spawn('validation'))

            record = EpochRecord(epoch=epoch, train_loss=total / len(train_data),
                                 validation_loss=validation_breakdown.total, recon=validation_breakdown.recon,
                                 kl=validation_breakdown.kl, dip=validation_breakdown.dip)
            history.append(record)
            signals.epoch_finished.send(sender=SceneVAE, run=run, record=record)
            logger.debug('train_vae: epoch {} train {:.6f} validation {:.6f}'.format(
                epoch, record.train_loss, record.validation_loss))

            if stopper.update(epoch, record.validation_loss):
                best_state = model.state_dict()
            if stopper.should_stop(epoch):
                stopped_early = epoch < train_config.max_epochs
                break
    except Exception as e:
        signals.training_failed.send(sender=SceneVAE, run=run, error=e)
        raise

    model.load_state_dict(best_state)
    model.eval()
    result = TrainingResult(model=model, history=history, best_epoch=stopper.best_epoch,
                            best_validation_loss=stopper.best_loss, stopped_early=stopped_early)
    signals.training_finished.send(sender=SceneVAE, run=run, result=result)
    logger.info('train_vae: best epoch {} of {} (validation loss {:.6f})'.format(
        result.best_epoch, result.epochs_run, result.best_validation_loss))
    return result


def latent_traverse(z, dim, values, model):
    """
    Decodes copies of ``z`` whose component ``dim`` is replaced by each of ``values``

    :param z: [latent_dim] vector
    :param int dim:
    :param list values:
    :param SceneVAE model:
    :return numpy.ndarray: [3, S, S * len(values)] strip of tiles, left to right in the order of ``values``
    """
    z = np.asarray(z, dtype=model.mu_head.weights.dtype)
    if z.shape != (model.config.latent_dim,):
        raise ShapeError('latent_traverse: expected a latent vector of length {}, got shape {}.'.format(
            model.config.latent_dim, z.shape))
    if not 0 <= dim < model.config.latent_dim:
        raise ConfigurationError('latent_traverse: dim {} out of range [0, {}).'.format(dim, model.config.latent_dim))
    if not len(values):
        raise ConfigurationError('latent_traverse: no values given.')

    codes = np.repeat(z[None], len(values), axis=0)
    codes[:, dim] = values
    with inference(model):
        tiles = model.decode_batch(T.Tensor(codes)).data
    return tile_grid(tiles)


def reconstruction_grid(images, model):
    """
    Inputs on the top row, reconstructions decode(mu) on the bottom row

    :return numpy.ndarray: [3, 2 * S, N * S]
    """
    batch = _as_image_batch(images, model.mu_head.weights.dtype)
    codes = encode_many(batch, model)
    with inference(model):
        reconstructions = model.decode_batch(T.Tensor(np.stack([code.mu for code in codes]))).data
    return tile_grid(list(batch) + list(reconstructions), columns=len(batch))


def serialize_vae(model, extra=None):
    """
    Checkpoint bytes holding the model weights, batchnorm buffers and configuration

    :param SceneVAE model:
    :param dict extra: Additional JSON-serializable entries of the configuration blob
    :return bytes:
    """
    config = {'vae': model.config.to_dict()}
    config.update(extra or {})
    return serialize_checkpoint(model.state_dict(), config, kind=constants.CHECKPOINT_KIND_VAE)


def load_vae(path):
    tensors, config = load_checkpoint(path, kind=constants.CHECKPOINT_KIND_VAE)
    model = SceneVAE(VaeConfig.from_dict(config['vae']))
    model.load_state_dict(tensors)
    return model.eval()
