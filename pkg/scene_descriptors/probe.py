# -*- coding: utf-8 -*-
"""
Linear probe: two stacked linear layers without an activation in between, trained on frozen descriptors.
"""
import logging
from dataclasses import asdict, dataclass

import numpy as np

from . import constants
from . import nn
from . import signals
from . import tensor as T
from .checkpoints import load_checkpoint, serialize_checkpoint
from .exceptions import ConfigurationError, DatasetError, ShapeError
from .optim import Adam
from .rng import Rng
from .settings import (
    SCENE_ADAM_BETA1, SCENE_ADAM_BETA2, SCENE_ADAM_EPSILON, SCENE_PROBE_EPOCHS, SCENE_PROBE_HIDDEN,
    SCENE_PROBE_LEARNING_RATE)

logger = logging.getLogger(__name__)

NUM_CLASSES = len(constants.LABEL_NAMES)


@dataclass
class ProbeConfig:
    epochs: int = SCENE_PROBE_EPOCHS
    learning_rate: float = SCENE_PROBE_LEARNING_RATE
    hidden: int = SCENE_PROBE_HIDDEN
    seed: int = 0
    beta1: float = SCENE_ADAM_BETA1
    beta2: float = SCENE_ADAM_BETA2
    epsilon: float = SCENE_ADAM_EPSILON

    def __post_init__(self):
        if self.epochs < 1 or self.hidden < 1:
            raise ConfigurationError('epochs and hidden must be >= 1, got {} and {}.'.format(self.epochs, self.hidden))
        if self.learning_rate <= 0:
            raise ConfigurationError('learning_rate must be positive, got {}.'.format(self.learning_rate))

    def to_dict(self):
        return asdict(self)


class ProbeModel(nn.Module):
    def __init__(self, dim, hidden=SCENE_PROBE_HIDDEN, classes=NUM_CLASSES, rng=None):
        # slope 1 turns the Kaiming scaling into plain 1/fan_in variance (no activation follows)
        self.layer1 = nn.LinearLayer(dim, hidden, rng=rng, slope=1.0)
        self.layer2 = nn.LinearLayer(hidden, classes, rng=rng, slope=1.0)

    @property
    def dim(self):
        return self.layer1.weights.shape[1]

    @property
    def hidden(self):
        return self.layer1.weights.shape[0]

    @property
    def classes(self):
        return self.layer2.weights.shape[0]

    def __call__(self, x):
        return self.layer2(self.layer1(x))

    def affine(self):
        """
        The equivalent single affine map

        :return tuple: (W [classes, dim], b [classes]) with W = W2 W1 and b = W2 b1 + b2
        """
        w1, b1 = self.layer1.weights.data.astype(np.float64), self.layer1.bias.data.astype(np.float64)
        w2, b2 = self.layer2.weights.data.astype(np.float64), self.layer2.bias.data.astype(np.float64)
        return w2 @ w1, w2 @ b1 + b2


@dataclass
class Prediction:
    label: int
    logits: np.ndarray


def _as_training_arrays(descriptors, labels=None):
    if labels is None:
        labels = descriptors.label_array()
        values = descriptors.values
    else:
        values = np.asarray(getattr(descriptors, 'values', descriptors), dtype=np.float32)
        labels = np.asarray(labels, dtype=np.int64)
    if values.ndim != 2 or len(values) != len(labels):
        raise ShapeError('train_probe: {} descriptors for {} labels.'.format(len(values), len(labels)))
    return values, labels


def train_probe(descriptors, labels=None, config=None, run=None):
    """
    Full-batch Adam on the softmax cross-entropy of the probe logits. The descriptors are fixed inputs, so nothing
      upstream of them is touched.

    :param descriptors: DescriptorSet with labels, or a [N, D] array together with ``labels``
    :param labels: [N] ints in {0, 1, 2}
    :param ProbeConfig config:
    :param run: Optional TrainingRun receiving lifecycle signals
    :return ProbeModel:
    """
    config = config or ProbeConfig()
    values, labels = _as_training_arrays(descriptors, labels)
    missing = sorted(set(range(NUM_CLASSES)) - set(labels.tolist()))
    if missing:
        raise DatasetError('train_probe: no samples for class(es) {}.'.format(
            ', '.join(constants.LABEL_NAMES[index] for index in missing)))
    if labels.min() < 0 or labels.max() >= NUM_CLASSES:
        raise DatasetError('train_probe: labels must lie in [0, {}).'.format(NUM_CLASSES))

    rng = Rng(config.seed)
    model = ProbeModel(values.shape[1], config.hidden, rng=rng.spawn('probe-init'))
    optimizer = Adam(model.parameters(), lr=config.learning_rate, beta1=config.beta1, beta2=config.beta2,
                     epsilon=config.epsilon)
    x = T.Tensor(values)

    signals.training_started.send(sender=ProbeModel, run=run, config={'probe': config.to_dict()})
    history = []
    try:
        for epoch in range(1, config.epochs + 1):
            loss = nn.softmax_xent(model(x), labels)
            T.backward(loss)
            optimizer.step()
            optimizer.zero_grad()
            history.append(loss.item())
    except Exception as e:
        signals.training_failed.send(sender=ProbeModel, run=run, error=e)
        raise

    model.eval()
    model.history = history
    signals.training_finished.send(sender=ProbeModel, run=run, result=model)
    logger.info('train_probe: {} samples, {} epochs, final loss {:.6f}'.format(len(values), config.epochs,
                                                                            history[-1]))
    return model


def logits_of(model, values):
    values = np.asarray(values, dtype=np.float32)
    if values.ndim == 1:
        values = values[None]
    if values.shape[1] != model.dim:
        raise ShapeError('predict: descriptor length {} does not match probe input {}.'.format(
            values.shape[1], model.dim))
    with T.no_grad():
        return model(T.Tensor(values)).data


def predict(model, descriptor):
    """
    :param ProbeModel model:
    :param descriptor: Descriptor or vector
    :return Prediction: argmax of the logits, ties broken toward the lowest class index
    """
    logits = logits_of(model, getattr(descriptor, 'values', descriptor))[0]
    return Prediction(label=int(np.argmax(logits)), logits=logits)


def predict_many(model, values):
    """
    :return numpy.ndarray: predicted class per row
    """
    return np.argmax(logits_of(model, getattr(values, 'values', values)), axis=1)


def serialize_probe(model, extra=None):
    config = {'probe': {'dim': model.dim, 'hidden': model.hidden, 'classes': model.classes}}
    config.update(extra or {})
    return serialize_checkpoint(model.state_dict(), config, kind=constants.CHECKPOINT_KIND_PROBE)


def load_probe(path):
    tensors, config = load_checkpoint(path, kind=constants.CHECKPOINT_KIND_PROBE)
    shape = config['probe']
    model = ProbeModel(shape['dim'], shape['hidden'], shape['classes'])
    model.load_state_dict(tensors)
    return model.eval()
