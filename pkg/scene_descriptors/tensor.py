# -*- coding: utf-8 -*-
"""
Dense tensors with reverse-mode automatic differentiation.

Tensors are row-major numpy arrays (32-bit floats by default). Every differentiable operation executed while one of
its inputs requires a gradient is appended to the thread's GradientTape; ``backward`` walks that record in reverse
exactly once and then consumes it.

Broadcasting is limited to trailing-dimension expansion: the operands of ``add``, ``sub`` and ``mul`` must either have
identical shapes, or the shape of one operand must equal the trailing dimensions of the other (a bias of shape [D]
against a batch of shape [N, D], or a 0-d scalar against anything).
"""
import contextlib
import logging
import threading

import numpy as np

from .exceptions import ConfigurationError, NumericError, ShapeError, TapeError

logger = logging.getLogger(__name__)

_local = threading.local()

OPERATIONS = {}


def get_default_dtype():
    return getattr(_local, 'dtype', np.float32)


@contextlib.contextmanager
def float64_mode():
    """
    Shadow mode used by gradient checks: tensors created from python data are 64-bit while the context is active
    """
    previous = get_default_dtype()
    _local.dtype = np.float64
    try:
        yield
    finally:
        _local.dtype = previous


def is_grad_enabled():
    return getattr(_local, 'grad_enabled', True)


@contextlib.contextmanager
def no_grad():
    """
    Disables recording on the current thread's tape
    """
    previous = is_grad_enabled()
    _local.grad_enabled = False
    try:
        yield
    finally:
        _local.grad_enabled = previous


def get_tape():
    """
    Returns the GradientTape of the calling thread, creating it on first use
    """
    tape = getattr(_local, 'tape', None)
    if tape is None:
        tape = _local.tape = GradientTape()
    return tape


def _check_finite(array, kind):
    if not np.isfinite(array).all():
        raise NumericError('{}: non-finite value in output of shape {}.'.format(kind, tuple(array.shape)))


class Tensor(object):
    """
    n-dimensional float array participating in the differentiation graph
    """

    def __init__(self, data, requires_grad=False, name=None):
        if isinstance(data, Tensor):
            data = data.data
        if isinstance(data, np.ndarray) and data.dtype in (np.float32, np.float64):
            array = data
        else:
            array = np.asarray(data, dtype=get_default_dtype())
        if any(extent < 1 for extent in array.shape):
            raise ShapeError('Tensor extents must be positive, got {}.'.format(tuple(array.shape)))
        _check_finite(array, 'tensor')
        self.data = array
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.name = name
        self._node = None

    @classmethod
    def _wrap(cls, array):
        tensor = cls.__new__(cls)
        tensor.data = array
        tensor.requires_grad = False
        tensor.grad = None
        tensor.name = None
        tensor._node = None
        return tensor

    @property
    def shape(self):
        return tuple(self.data.shape)

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return int(self.data.size)

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def T(self):
        return transpose(self)

    def item(self):
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else self.data.tolist()

    def numpy(self):
        return self.data

    def detach(self):
        return Tensor._wrap(self.data)

    def zero_grad(self):
        self.grad = None

    def cast(self, dtype):
        """
        Changes the storage precision in place (used for 64-bit gradient checks)
        """
        self.data = self.data.astype(dtype)
        if self.grad is not None:
            self.grad = self.grad.astype(dtype)
        return self

    def __repr__(self):
        return 'Tensor(shape={}, dtype={}, requires_grad={})'.format(self.shape, self.dtype, self.requires_grad)

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise ShapeError('div: only division by a python scalar is supported.')
        return mul(self, 1.0 / other)

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


class Node(object):
    __slots__ = ('operation', 'inputs', 'output', 'tape', 'generation')

    def __init__(self, operation, inputs, output, tape, generation):
        self.operation = operation
        self.inputs = inputs
        self.output = output
        self.tape = tape
        self.generation = generation


class GradientTape(object):
    """
    Ordered record of executed differentiable operations. Inputs are always recorded before the operations consuming
      them, so reverse record order is a valid reverse topological order.
    """

    def __init__(self):
        self.records = []
        self.generation = 0

    def __len__(self):
        return len(self.records)

    def record(self, operation, inputs, output):
        node = Node(operation, inputs, output, self, self.generation)
        output._node = node
        self.records.append(node)
        return node

    def reset(self):
        self.records = []
        self.generation += 1

    def _is_recorded(self, tensor):
        return tensor._node is not None and tensor._node.tape is self and tensor._node.generation == self.generation

    def backward(self, loss):
        if loss.size != 1:
            raise TapeError('backward: loss must be a scalar, got shape {}.'.format(loss.shape))
        if loss._node is None:
            raise TapeError('backward: the tape holds no operation producing this loss.')
        if not self._is_recorded(loss):
            raise TapeError('backward: tape already consumed; run a new forward pass first.')

        stop = next(index for index, node in enumerate(self.records) if node is loss._node)
        grads = {id(loss): np.ones_like(loss.data)}

        for node in reversed(self.records[:stop + 1]):
            grad = grads.pop(id(node.output), None)
            if grad is None:
                continue
            input_grads = node.operation.backward(grad)
            for tensor, input_grad in zip(node.inputs, input_grads):
                if input_grad is None or not tensor.requires_grad:
                    continue
                if self._is_recorded(tensor):
                    key = id(tensor)
                    grads[key] = input_grad if key not in grads else grads[key] + input_grad
                elif tensor.grad is None:
                    tensor.grad = np.array(input_grad, dtype=tensor.data.dtype)
                else:
                    tensor.grad = (tensor.grad + input_grad).astype(tensor.data.dtype, copy=False)

        logger.debug('backward: consumed {} records'.format(len(self.records)))
        self.reset()


def backward(loss):
    """
    Populates ``grad`` on every leaf that requires a gradient, then consumes the tape

    :param Tensor loss: Scalar tensor
    """
    if loss._node is None:
        raise TapeError('backward: the tape holds no operation producing this loss.')
    loss._node.tape.backward(loss)


class Operation(object):
    """
    A differentiable operation. ``forward`` receives raw arrays and may keep what ``backward`` needs on the instance;
      ``backward`` returns one gradient (or None) per input.
    """
    kind = None

    def __init__(self, **params):
        self.params = params

    def forward(self, *arrays):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError


def register(kind):
    def decorator(cls):
        cls.kind = kind
        OPERATIONS[kind] = cls
        return cls
    return decorator


def apply(operation, *inputs):
    tensors = [as_tensor(value) for value in inputs]
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        out = operation.forward(*[tensor.data for tensor in tensors])
    out = np.asarray(out)
    _check_finite(out, operation.kind)
    result = Tensor._wrap(out)
    if is_grad_enabled() and any(tensor.requires_grad for tensor in tensors):
        result.requires_grad = True
        get_tape().record(operation, tensors, result)
    return result


def forward_op(kind, *inputs, **params):
    """
    Runs the registered operation ``kind`` on ``inputs``

    :param str kind: One of the keys of OPERATIONS
    :return Tensor:
    """
    try:
        operation_class = OPERATIONS[kind]
    except KeyError:
        raise ConfigurationError('Unknown operation "{}".'.format(kind))
    return apply(operation_class(**params), *inputs)


def _check_trailing(kind, a_shape, b_shape):
    if a_shape == b_shape:
        return
    small, large = (a_shape, b_shape) if len(a_shape) <= len(b_shape) else (b_shape, a_shape)
    if large[len(large) - len(small):] != small:
        raise ShapeError('{}: shapes {} and {} do not conform (only trailing-dimension expansion is supported).'.format(
            kind, a_shape, b_shape))


def _unbroadcast(grad, shape):
    if grad.shape == shape:
        return grad
    return grad.sum(axis=tuple(range(grad.ndim - len(shape)))).reshape(shape)


@register('add')
class Add(Operation):
    def forward(self, a, b):
        _check_trailing(self.kind, a.shape, b.shape)
        self.shapes = a.shape, b.shape
        return a + b

    def backward(self, grad):
        return _unbroadcast(grad, self.shapes[0]), _unbroadcast(grad, self.shapes[1])


@register('sub')
class Sub(Operation):
    def forward(self, a, b):
        _check_trailing(self.kind, a.shape, b.shape)
        self.shapes = a.shape, b.shape
        return a - b

    def backward(self, grad):
        return _unbroadcast(grad, self.shapes[0]), _unbroadcast(-grad, self.shapes[1])


@register('mul')
class Mul(Operation):
    def forward(self, a, b):
        _check_trailing(self.kind, a.shape, b.shape)
        self.a, self.b = a, b
        return a * b

    def backward(self, grad):
        return _unbroadcast(grad * self.b, self.a.shape), _unbroadcast(grad * self.a, self.b.shape)


@register('matmul')
class MatMul(Operation):
    """
    Contraction of a [m, k] matrix with a [k, n] matrix
    """

    def forward(self, a, b):
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeError('{}: shapes {} and {} do not contract.'.format(self.kind, a.shape, b.shape))
        self.a, self.b = a, b
        return a @ b

    def backward(self, grad):
        return grad @ self.b.T, self.a.T @ grad


@register('transpose')
class Transpose(Operation):
    def forward(self, a):
        if a.ndim != 2:
            raise ShapeError('{}: expected a matrix, got shape {}.'.format(self.kind, a.shape))
        return np.ascontiguousarray(a.T)

    def backward(self, grad):
        return grad.T,


def _normalize_axis(kind, axis, ndim):
    if axis is None:
        return None
    if not -ndim <= axis < ndim:
        raise ShapeError('{}: axis {} out of range for {} dimensions.'.format(kind, axis, ndim))
    return axis % ndim


@register('sum')
class Sum(Operation):
    """
    Sum over all elements (axis=None) or over one axis
    """

    def forward(self, a):
        self.axis = _normalize_axis(self.kind, self.params.get('axis'), a.ndim)
        self.shape = a.shape
        return np.asarray(a.sum(axis=self.axis))

    def backward(self, grad):
        if self.axis is not None:
            grad = np.expand_dims(grad, self.axis)
        return np.broadcast_to(grad, self.shape),


@register('mean')
class Mean(Sum):
    def forward(self, a):
        total = super(Mean, self).forward(a)
        self.count = a.size if self.axis is None else a.shape[self.axis]
        return total / self.count

    def backward(self, grad):
        return super(Mean, self).backward(grad / self.count)


@register('exp')
class Exp(Operation):
    def forward(self, a):
        self.out = np.exp(a)
        return self.out

    def backward(self, grad):
        return grad * self.out,


@register('log')
class Log(Operation):
    def forward(self, a):
        self.a = a
        return np.log(a)

    def backward(self, grad):
        return grad / self.a,


@register('square')
class Square(Operation):
    def forward(self, a):
        self.a = a
        return a * a

    def backward(self, grad):
        return 2.0 * grad * self.a,


@register('concat')
class Concat(Operation):
    """
    Joins tensors along ``axis`` (default 0); every other extent must agree
    """

    def forward(self, *arrays):
        axis = self.params.get('axis', 0)
        first = arrays[0]
        self.axis = _normalize_axis(self.kind, axis, first.ndim)
        for array in arrays[1:]:
            if array.ndim != first.ndim or any(
                    a != b for d, (a, b) in enumerate(zip(array.shape, first.shape)) if d != self.axis):
                raise ShapeError('{}: shapes {} and {} do not conform on axis {}.'.format(
                    self.kind, first.shape, array.shape, self.axis))
        self.sizes = [array.shape[self.axis] for array in arrays]
        return np.concatenate(arrays, axis=self.axis)

    def backward(self, grad):
        return tuple(np.split(grad, np.cumsum(self.sizes)[:-1], axis=self.axis))


@register('reshape')
class Reshape(Operation):
    def forward(self, a):
        shape = tuple(self.params['shape'])
        if int(np.prod(shape)) != a.size or any(extent < 1 for extent in shape):
            raise ShapeError('{}: cannot reshape {} into {}.'.format(self.kind, a.shape, shape))
        self.shape = a.shape
        return a.reshape(shape)

    def backward(self, grad):
        return grad.reshape(self.shape),


def add(a, b):
    return forward_op('add', a, b)


def sub(a, b):
    return forward_op('sub', a, b)


def mul(a, b):
    return forward_op('mul', a, b)


def matmul(a, b):
    return forward_op('matmul', a, b)


def transpose(a):
    return forward_op('transpose', a)


def sum(a, axis=None):
    return forward_op('sum', a, axis=axis)


def mean(a, axis=None):
    return forward_op('mean', a, axis=axis)


def exp(a):
    return forward_op('exp', a)


def log(a):
    return forward_op('log', a)


def square(a):
    return forward_op('square', a)


def concat(tensors, axis=0):
    return forward_op('concat', *tensors, axis=axis)


def reshape(a, shape):
    return forward_op('reshape', a, shape=shape)


def finite_difference_check(fn, inputs, epsilon=1e-4):
    """
    Compares reverse-mode gradients of ``fn`` with central finite differences, in 64-bit precision.

    The inputs are promoted to 64-bit for the duration of the check and perturbed in place, so ``fn`` may close over
    them (e.g. model parameters). Their original precision is restored afterwards.

    :param callable fn: Deterministic function of ``inputs`` returning a scalar Tensor
    :param list inputs: Tensors to differentiate against
    :param float epsilon: Perturbation size
    :return float: max over all input elements of |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
    """
    if epsilon <= 0:
        raise ConfigurationError('epsilon must be positive, got {}.'.format(epsilon))

    dtypes = [tensor.data.dtype for tensor in inputs]
    flags = [tensor.requires_grad for tensor in inputs]
    worst = 0.0
    try:
        for tensor in inputs:
            tensor.data = np.array(tensor.data, dtype=np.float64)
            tensor.grad = None
            tensor.requires_grad = True

        with float64_mode():
            loss = fn(*inputs)
            backward(loss)
            analytic = [np.zeros_like(tensor.data) if tensor.grad is None else np.asarray(tensor.grad, np.float64)
                        for tensor in inputs]

            with no_grad():
                for tensor, grad in zip(inputs, analytic):
                    flat = tensor.data.reshape(-1)
                    for index in range(flat.size):
                        original = flat[index]
                        flat[index] = original + epsilon
                        plus = float(fn(*inputs).data)
                        flat[index] = original - epsilon
                        minus = float(fn(*inputs).data)
                        flat[index] = original

                        numeric = (plus - minus) / (2.0 * epsilon)
                        value = float(grad.flat[index])
                        error = abs(value - numeric) / max(1e-8, abs(value) + abs(numeric))
                        worst = max(worst, error)
    finally:
        for tensor, dtype, flag in zip(inputs, dtypes, flags):
            tensor.data = tensor.data.astype(dtype)
            tensor.grad = None
            tensor.requires_grad = flag

    return worst
