# -*- coding: utf-8 -*-
"""
Differentiable layers for the encoder, the decoder and the linear probe.

Convolutions use cross-correlation semantics (no kernel flip) on [N, C, H, W] inputs. Transposed convolution weights
are laid out [in_ch, out_ch, k, k], so a Conv2dLayer weight read as a transposed weight gives the exact adjoint.
"""
import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import special

from . import tensor as T
from .exceptions import ShapeError
from .tensor import Operation, Tensor, register

logger = logging.getLogger(__name__)

TRAIN = 'train'
EVAL = 'eval'


def kaiming_normal(shape, fan_in, rng, slope=0.01):
    std = np.sqrt(2.0 / ((1.0 + slope ** 2) * fan_in))
    return rng.normal(shape) * np.float32(std)


class Module(object):
    """
    Container of parameters (Tensors requiring gradients), buffers (plain arrays listed in ``buffer_names``) and
      child modules. Names are dotted attribute paths, in attribute definition order.
    """
    buffer_names = ()

    mode = TRAIN

    def _children(self):
        for name, value in vars(self).items():
            if isinstance(value, Module):
                yield name, value
            elif isinstance(value, (list, tuple)) and value and all(isinstance(item, Module) for item in value):
                for index, item in enumerate(value):
                    yield '{}.{}'.format(name, index), item

    def named_parameters(self, prefix=''):
        for name, value in vars(self).items():
            if isinstance(value, Tensor) and value.requires_grad:
                yield prefix + name, value
        for name, child in self._children():
            for item in child.named_parameters(prefix='{}{}.'.format(prefix, name)):
                yield item

    def parameters(self):
        return [parameter for _, parameter in self.named_parameters()]

    def named_buffers(self, prefix=''):
        for name in self.buffer_names:
            yield prefix + name, getattr(self, name)
        for name, child in self._children():
            for item in child.named_buffers(prefix='{}{}.'.format(prefix, name)):
                yield item

    def train(self):
        self.mode = TRAIN
        for _, child in self._children():
            child.train()
        return self

    def eval(self):
        self.mode = EVAL
        for _, child in self._children():
            child.eval()
        return self

    def zero_grad(self):
        for parameter in self.parameters():
            parameter.zero_grad()

    def state_dict(self):
        """
        :return dict: name -> array copy, parameters first, then buffers
        """
        state = {name: parameter.data.copy() for name, parameter in self.named_parameters()}
        state.update((name, np.array(buffer, copy=True)) for name, buffer in self.named_buffers())
        return state

    def load_state_dict(self, state):
        for name, parameter in self.named_parameters():
            parameter.data = self._lookup(state, name, parameter.shape).astype(parameter.data.dtype)
        for name, buffer in self.named_buffers():
            owner, attribute = self._resolve(name)
            setattr(owner, attribute, self._lookup(state, name, buffer.shape).astype(buffer.dtype))

    def astype(self, dtype):
        for parameter in self.parameters():
            parameter.cast(dtype)
        for name, buffer in self.named_buffers():
            owner, attribute = self._resolve(name)
            setattr(owner, attribute, buffer.astype(dtype))
        return self

    @staticmethod
    def _lookup(state, name, shape):
        try:
            value = np.asarray(state[name])
        except KeyError:
            raise ShapeError('Missing state entry "{}".'.format(name))
        if value.shape != tuple(shape):
            raise ShapeError('State entry "{}" has shape {}, expected {}.'.format(name, value.shape, tuple(shape)))
        return value

    def _resolve(self, dotted):
        owner = self
        parts = dotted.split('.')
        for part in parts[:-1]:
            owner = owner[int(part)] if isinstance(owner, (list, tuple)) else getattr(owner, part)
        return owner, parts[-1]


def _check_geometry(kernel_size, stride, padding):
    if kernel_size < 1 or stride < 1 or padding < 0:
        raise ShapeError('Invalid convolution geometry k={} stride={} padding={}.'.format(kernel_size, stride, padding))


class Conv2dLayer(Module):
    def __init__(self, in_ch, out_ch, kernel_size, stride=1, padding=0, rng=None, slope=0.01):
        _check_geometry(kernel_size, stride, padding)
        fan_in = in_ch * kernel_size * kernel_size
        shape = (out_ch, in_ch, kernel_size, kernel_size)
        weights = kaiming_normal(shape, fan_in, rng, slope) if rng is not None else np.zeros(shape, np.float32)
        self.weights = Tensor(weights, requires_grad=True)
        self.bias = Tensor(np.zeros(out_ch, np.float32), requires_grad=True)
        self.stride = stride
        self.padding = padding

    @property
    def in_ch(self):
        return self.weights.shape[1]

    @property
    def out_ch(self):
        return self.weights.shape[0]

    @property
    def kernel_size(self):
        return self.weights.shape[2]

    def __call__(self, x):
        return conv2d(x, self)


class ConvTranspose2dLayer(Conv2dLayer):
    def __init__(self, in_ch, out_ch, kernel_size, stride=1, padding=0, rng=None, slope=0.01):
        _check_geometry(kernel_size, stride, padding)
        # Weights are [in_ch, out_ch, k, k]; fan-in follows the out_ch * k * k convention
        shape = (in_ch, out_ch, kernel_size, kernel_size)
        fan_in = out_ch * kernel_size * kernel_size
        weights = kaiming_normal(shape, fan_in, rng, slope) if rng is not None else np.zeros(shape, np.float32)
        self.weights = Tensor(weights, requires_grad=True)
        self.bias = Tensor(np.zeros(out_ch, np.float32), requires_grad=True)
        self.stride = stride
        self.padding = padding

    @property
    def in_ch(self):
        return self.weights.shape[0]

    @property
    def out_ch(self):
        return self.weights.shape[1]

    def __call__(self, x):
        return conv_transpose2d(x, self)


class BatchNorm2dLayer(Module):
    buffer_names = ('running_mean', 'running_var')

    def __init__(self, ch, momentum=0.1, epsilon=1e-5):
        self.gamma = Tensor(np.ones(ch, np.float32), requires_grad=True)
        self.beta = Tensor(np.zeros(ch, np.float32), requires_grad=True)
        self.running_mean = np.zeros(ch, np.float32)
        self.running_var = np.ones(ch, np.float32)
        self.momentum = momentum
        self.epsilon = epsilon

    def __call__(self, x):
        return batchnorm2d(x, self)


class LinearLayer(Module):
    def __init__(self, in_features, out_features, rng=None, slope=0.01):
        shape = (out_features, in_features)
        weights = kaiming_normal(shape, in_features, rng, slope) if rng is not None else np.zeros(shape, np.float32)
        self.weights = Tensor(weights, requires_grad=True)
        self.bias = Tensor(np.zeros(out_features, np.float32), requires_grad=True)

    def __call__(self, x):
        return linear(x, self)


def _windows(padded, kernel_size, stride):
    """
    [N, C, Hp, Wp] -> strided view [N, C, H', W', k, k]
    """
    return sliding_window_view(padded, (kernel_size, kernel_size), axis=(2, 3))[:, :, ::stride, ::stride]


def _scatter_windows(columns, out_shape, kernel_size, stride):
    """
    Adjoint of ``_windows``: adds [N, H', W', C, k, k] columns back into a zeroed [N, C, Hp, Wp] buffer
    """
    buffer = np.zeros(out_shape, dtype=columns.dtype)
    height, width = columns.shape[1], columns.shape[2]
    for i in range(kernel_size):
        for j in range(kernel_size):
            buffer[:, :, i:i + stride * height:stride, j:j + stride * width:stride] += \
                columns[:, :, :, :, i, j].transpose(0, 3, 1, 2)
    return buffer


@register('conv2d')
class Conv2d(Operation):
    def forward(self, x, weights, bias):
        stride, padding = self.params['stride'], self.params['padding']
        out_ch, in_ch, k, _ = weights.shape
        if x.ndim != 4 or x.shape[1] != in_ch:
            raise ShapeError('{}: input shape {} does not match weights {}.'.format(self.kind, x.shape, weights.shape))
        height = (x.shape[2] + 2 * padding - k) // stride + 1
        width = (x.shape[3] + 2 * padding - k) // stride + 1
        if height < 1 or width < 1:
            raise ShapeError('{}: degenerate output size for input {} and kernel {}.'.format(
                self.kind, x.shape, weights.shape))

        padded = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
        self.columns = _windows(padded, k, stride)
        self.padded_shape = padded.shape
        self.input_shape = x.shape
        self.weights = weights
        out = np.tensordot(self.columns, weights, axes=([1, 4, 5], [1, 2, 3]))
        return np.ascontiguousarray(out.transpose(0, 3, 1, 2)) + bias[None, :, None, None]

    def backward(self, grad):
        stride, padding = self.params['stride'], self.params['padding']
        k = self.weights.shape[2]
        grad_weights = np.tensordot(grad, self.columns, axes=([0, 2, 3], [0, 2, 3]))
        grad_bias = grad.sum(axis=(0, 2, 3))
        columns = np.tensordot(grad, self.weights, axes=([1], [0]))
        padded = _scatter_windows(columns, self.padded_shape, k, stride)
        height, width = self.input_shape[2], self.input_shape[3]
        grad_x = padded[:, :, padding:padding + height, padding:padding + width]
        return grad_x, grad_weights, grad_bias


@register('conv_transpose2d')
class ConvTranspose2d(Operation):
    def forward(self, x, weights, bias):
        stride, padding = self.params['stride'], self.params['padding']
        in_ch, out_ch, k, _ = weights.shape
        if x.ndim != 4 or x.shape[1] != in_ch:
            raise ShapeError('{}: input shape {} does not match weights {}.'.format(self.kind, x.shape, weights.shape))
        full_height = (x.shape[2] - 1) * stride + k
        full_width = (x.shape[3] - 1) * stride + k
        if full_height - 2 * padding < 1 or full_width - 2 * padding < 1:
            raise ShapeError('{}: degenerate output size for input {} and kernel {}.'.format(
                self.kind, x.shape, weights.shape))

        self.x, self.weights = x, weights
        self.full_shape = (x.shape[0], out_ch, full_height, full_width)
        columns = np.tensordot(x, weights, axes=([1], [0]))
        full = _scatter_windows(columns, self.full_shape, k, stride)
        out = full[:, :, padding:full_height - padding, padding:full_width - padding]
        return out + bias[None, :, None, None]

    def backward(self, grad):
        stride, padding = self.params['stride'], self.params['padding']
        k = self.weights.shape[2]
        full = np.pad(grad, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
        windows = _windows(full, k, stride)
        grad_x = np.tensordot(windows, self.weights, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
        grad_weights = np.tensordot(self.x, windows, axes=([0, 2, 3], [0, 2, 3]))
        grad_bias = grad.sum(axis=(0, 2, 3))
        return grad_x, grad_weights, grad_bias


@register('batchnorm2d')
class BatchNorm2d(Operation):
    """
    Per-channel normalization. In train mode the statistics come from the batch (biased variance) and the running
      buffers of ``layer`` are updated with the unbiased variance; in eval mode the running buffers are used.
    """

    def forward(self, x, gamma, beta):
        layer = self.params['layer']
        if x.ndim != 4 or x.shape[1] != gamma.shape[0]:
            raise ShapeError('{}: input shape {} does not match {} channels.'.format(
                self.kind, x.shape, gamma.shape[0]))
        self.training = layer.mode == TRAIN
        if self.training:
            if x.shape[0] < 2:
                raise ShapeError('{}: train mode needs a batch of at least 2, got {}.'.format(self.kind, x.shape[0]))
            batch_mean = x.mean(axis=(0, 2, 3))
            batch_var = x.var(axis=(0, 2, 3))
            count = x.shape[0] * x.shape[2] * x.shape[3]
            momentum = layer.momentum
            layer.running_mean = ((1.0 - momentum) * layer.running_mean + momentum * batch_mean).astype(
                layer.running_mean.dtype)
            layer.running_var = ((1.0 - momentum) * layer.running_var +
                                 momentum * batch_var * count / (count - 1.0)).astype(layer.running_var.dtype)
            mean, var = batch_mean, batch_var
        else:
            mean, var = layer.running_mean, layer.running_var

        self.inv_std = (1.0 / np.sqrt(var + layer.epsilon)).astype(x.dtype)[None, :, None, None]
        self.normalized = (x - mean[None, :, None, None]) * self.inv_std
        self.gamma = gamma
        return self.normalized * gamma[None, :, None, None] + beta[None, :, None, None]

    def backward(self, grad):
        grad_gamma = (grad * self.normalized).sum(axis=(0, 2, 3))
        grad_beta = grad.sum(axis=(0, 2, 3))
        scale = self.gamma[None, :, None, None] * self.inv_std
        if not self.training:
            return grad * scale, grad_gamma, grad_beta
        count = grad.shape[0] * grad.shape[2] * grad.shape[3]
        grad_x = scale / count * (count * grad - grad_beta[None, :, None, None] -
                                  self.normalized * grad_gamma[None, :, None, None])
        return grad_x, grad_gamma, grad_beta


@register('leaky_relu')
class LeakyRelu(Operation):
    def forward(self, x):
        self.slope = self.params.get('slope', 0.01)
        self.positive = x >= 0
        return np.where(self.positive, x, x * self.slope)

    def backward(self, grad):
        return np.where(self.positive, grad, grad * self.slope),


@register('sigmoid')
class Sigmoid(Operation):
    def forward(self, x):
        self.out = special.expit(x)
        return self.out

    def backward(self, grad):
        return grad * self.out * (1.0 - self.out),


@register('softmax_xent')
class SoftmaxCrossEntropy(Operation):
    """
    Mean over the batch of -log softmax(logits)[label]; log-softmax subtracts the row maximum before exponentiating
    """

    def forward(self, logits):
        labels = self.params['labels']
        if logits.ndim != 2 or labels.shape != (logits.shape[0],):
            raise ShapeError('{}: logits {} do not match labels {}.'.format(self.kind, logits.shape, labels.shape))
        if labels.min() < 0 or labels.max() >= logits.shape[1]:
            raise ShapeError('{}: labels must lie in [0, {}).'.format(self.kind, logits.shape[1]))
        log_probs = special.log_softmax(logits, axis=1)
        self.probs = np.exp(log_probs)
        self.labels = labels
        rows = np.arange(logits.shape[0])
        return np.asarray(-log_probs[rows, labels].mean(), dtype=logits.dtype)

    def backward(self, grad):
        delta = self.probs.copy()
        delta[np.arange(delta.shape[0]), self.labels] -= 1.0
        return grad * delta / delta.shape[0],


def conv2d(x, layer):
    """
    Strided 2-D cross-correlation; output extent floor((in + 2*padding - k) / stride) + 1
    """
    return T.forward_op('conv2d', x, layer.weights, layer.bias, stride=layer.stride, padding=layer.padding)


def conv_transpose2d(x, layer):
    """
    Adjoint of conv2d; output extent (in - 1) * stride - 2 * padding + k
    """
    return T.forward_op('conv_transpose2d', x, layer.weights, layer.bias, stride=layer.stride, padding=layer.padding)


def batchnorm2d(x, layer):
    return T.forward_op('batchnorm2d', x, layer.gamma, layer.beta, layer=layer)


def leaky_relu(x, slope=0.01):
    return T.forward_op('leaky_relu', x, slope=slope)


def sigmoid(x):
    return T.forward_op('sigmoid', x)


def linear(x, layer):
    """
    x [N, in] -> x W^T + b, [N, out]
    """
    x = T.as_tensor(x)
    if x.ndim != 2 or x.shape[1] != layer.weights.shape[1]:
        raise ShapeError('linear: input shape {} does not match weights {}.'.format(x.shape, layer.weights.shape))
    return T.matmul(x, T.transpose(layer.weights)) + layer.bias


def reparameterize(mu, logvar, eps):
    """
    z = mu + exp(0.5 * logvar) * eps, with eps held constant
    """
    mu, logvar, eps = T.as_tensor(mu), T.as_tensor(logvar), T.Tensor(T.as_tensor(eps).data)
    if not mu.shape == logvar.shape == eps.shape:
        raise ShapeError('reparameterize: shapes {}, {} and {} differ.'.format(mu.shape, logvar.shape, eps.shape))
    return mu + T.exp(logvar * 0.5) * eps


def softmax_xent(logits, labels):
    """
    Softmax cross-entropy, averaged over the batch

    :param Tensor logits: [N, K] (or [K] for a single sample)
    :param labels: [N] integer labels (or a single int)
    :return Tensor: scalar loss
    """
    logits = T.as_tensor(logits)
    if logits.ndim == 1:
        logits = T.reshape(logits, (1, logits.shape[0]))
    labels = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    return T.forward_op('softmax_xent', logits, labels=labels)
