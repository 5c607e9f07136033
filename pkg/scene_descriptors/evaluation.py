# -*- coding: utf-8 -*-
"""
Accuracy reports for the linear probe and a latency microbenchmark for descriptor extraction.
"""
import logging
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List

import numpy as np

from . import constants
from .descriptors import PhogConfig, phog, random_descriptor
from .datasets import to_grayscale
from .exceptions import ConfigurationError, DatasetError, ShapeError
from .probe import NUM_CLASSES, predict_many
from .rng import Rng
from .settings import SCENE_BENCH_IMAGE_SIZE, SCENE_BENCH_REPS, SCENE_BENCH_WARMUP, SCENE_PASS_BAR
from .vae import encode

logger = logging.getLogger(__name__)

MIN_REPS = 30

BENCH_KINDS = (constants.SOURCE_VAE, constants.SOURCE_PHOG, constants.SOURCE_RANDOM)


@dataclass
class EvalReport:
    accuracy: float
    per_class_accuracy: List[float]
    confusion: np.ndarray
    n: int

    def passes(self, bar=SCENE_PASS_BAR):
        return passes_bar(self.accuracy, bar)

    def to_dict(self):
        return {
            'accuracy': self.accuracy,
            'per_class_accuracy': OrderedDict(zip(constants.LABEL_NAMES, self.per_class_accuracy)),
            'confusion': self.confusion.tolist(),
            'n': self.n,
        }


def report_from_predictions(labels, predictions):
    """
    :param labels: true classes
    :param predictions: predicted classes
    :return EvalReport: confusion rows are true classes, columns predictions
    """
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.shape != predictions.shape or labels.ndim != 1:
        raise ShapeError('{} labels for {} predictions.'.format(labels.shape, predictions.shape))
    if labels.size == 0:
        raise DatasetError('Cannot evaluate an empty set.')

    confusion = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    np.add.at(confusion, (labels, predictions), 1)
    support = confusion.sum(axis=1)
    per_class = [100.0 * confusion[index, index] / support[index] if support[index] else 0.0
                 for index in range(NUM_CLASSES)]
    return EvalReport(accuracy=100.0 * np.trace(confusion) / confusion.sum(), per_class_accuracy=per_class,
                      confusion=confusion, n=int(labels.size))


def evaluate(probe, descriptors, labels=None):
    """
    :param ProbeModel probe:
    :param descriptors: DescriptorSet with labels, or [N, D] array together with ``labels``
    :return EvalReport:
    """
    if labels is None:
        labels = descriptors.label_array()
    values = getattr(descriptors, 'values', descriptors)
    if len(values) != len(labels):
        raise ShapeError('evaluate: {} descriptors for {} labels.'.format(len(values), len(labels)))
    if len(values) == 0:
        raise DatasetError('Cannot evaluate an empty set.')
    return report_from_predictions(labels, predict_many(probe, values))


def passes_bar(accuracy, bar=SCENE_PASS_BAR):
    """
    Whether an accuracy (percent) is strictly above the bar
    """
    return accuracy > bar


def evaluate_routes(probe, descriptor_set, bar=SCENE_PASS_BAR):
    """
    Accuracy per route, flagging routes strictly above ``bar`` percent

    :return OrderedDict: route -> {"accuracy", "n", "passes"}
    """
    routes = OrderedDict()
    for index, route in enumerate(descriptor_set.routes):
        routes.setdefault(route, []).append(index)
    result = OrderedDict()
    for route, rows in routes.items():
        report = evaluate(probe, descriptor_set.take(rows))
        result[route or ''] = {'accuracy': report.accuracy, 'n': report.n, 'passes': passes_bar(report.accuracy, bar)}
    return result


@dataclass
class BenchConfig:
    reps: int = SCENE_BENCH_REPS
    warmup: int = SCENE_BENCH_WARMUP
    image_size: int = SCENE_BENCH_IMAGE_SIZE
    median_of_means: bool = False

    def __post_init__(self):
        if self.reps < MIN_REPS:
            raise ConfigurationError('reps must be >= {}, got {}.'.format(MIN_REPS, self.reps))
        if self.warmup < 0 or self.image_size < 1:
            raise ConfigurationError('warmup must be >= 0 and image_size >= 1, got {} and {}.'.format(
                self.warmup, self.image_size))


@dataclass
class BenchResult:
    mean_us: float
    std_us: float
    reps: int
    descriptor_kind: str
    dim: int = 0
    samples: List[float] = field(default_factory=list, repr=False)

    def to_dict(self):
        return {'mean_us': self.mean_us, 'std_us': self.std_us, 'reps': self.reps,
                'descriptor_kind': self.descriptor_kind, 'dim': self.dim}


def _median_of_means(samples, groups=5):
    chunks = np.array_split(np.asarray(samples), min(groups, len(samples)))
    return float(np.median([chunk.mean() for chunk in chunks]))


def descriptor_function(kind, model=None, phog_config=None, dim=128, rng=None):
    """
    :return callable: image [3, S, S] -> descriptor vector
    """
    if kind == constants.SOURCE_VAE:
        if model is None:
            raise ConfigurationError('Benchmarking VAE descriptors needs a model.')
        return lambda image: encode(image, model).z
    if kind == constants.SOURCE_PHOG:
        config = phog_config or PhogConfig()
        return lambda image: phog(to_grayscale(image), config).values
    if kind == constants.SOURCE_RANDOM:
        stream = (rng or Rng(0)).spawn('bench-random')
        return lambda image: random_descriptor(dim, stream).values
    raise ConfigurationError('Unknown descriptor kind "{}" (expected one of {}).'.format(kind, ', '.join(BENCH_KINDS)))


def bench_descriptor(kind, images, reps=SCENE_BENCH_REPS, warmup=SCENE_BENCH_WARMUP, median_of_means=False,
                     **kwargs):
    """
    Wall-clock time to compute one descriptor from an image already decoded and resized in memory.

    :param str kind: "vae", "phog" or "random"
    :param images: [N, 3, S, S] pre-resized pixels
    :param int reps: Timed passes over ``images`` (>= 30)
    :param int warmup: Untimed calls before timing
    :param bool median_of_means: Report the median of group means instead of the plain mean
    :param kwargs: model / phog_config / dim / rng, see ``descriptor_function``
    :return BenchResult: per-image mean and standard deviation in microseconds
    """
    if reps < MIN_REPS:
        raise ConfigurationError('reps must be >= {}, got {}.'.format(MIN_REPS, reps))
    images = [np.ascontiguousarray(getattr(image, 'pixels', image)) for image in images]
    if not images:
        raise DatasetError('Nothing to benchmark.')
    compute = descriptor_function(kind, **kwargs)

    for index in range(warmup):
        compute(images[index % len(images)])

    samples = []
    dim = 0
    for _ in range(reps):
        for image in images:
            start = time.perf_counter()
            values = compute(image)
            samples.append((time.perf_counter() - start) * 1e6)
            dim = len(values)

    samples = np.asarray(samples)
    mean = _median_of_means(samples) if median_of_means else float(samples.mean())
    result = BenchResult(mean_us=mean, std_us=float(samples.std()), reps=reps, descriptor_kind=kind, dim=dim,
                         samples=samples.tolist())
    logger.info('bench_descriptor: {} {:.1f} +- {:.1f} us over {} calls'.format(
        kind, result.mean_us, result.std_us, len(samples)))
    return result


RESULTS_COLUMNS = ('Descriptor', 'Type', 'Dimensions', 'Accuracy', 'Compute Time')


def results_row(name, source, dimensions, accuracy=None, bench=None):
    return OrderedDict([
        ('Descriptor', name),
        ('Type', constants.SOURCE_TYPES.get(source, source)),
        ('Dimensions', str(dimensions)),
        ('Accuracy', '' if accuracy is None else '{:.2f}'.format(accuracy)),
        ('Compute Time', '' if bench is None else '{:.1f} ± {:.1f}'.format(bench.mean_us, bench.std_us)),
    ])


def format_results_table(rows):
    """
    Plain-text table with aligned columns: Descriptor, Type, Dimensions, Accuracy, Compute Time (microseconds)

    :param list rows: OrderedDicts as returned by ``results_row``
    :return str:
    """
    widths = [max([len(column)] + [len(row[column]) for row in rows]) for column in RESULTS_COLUMNS]
    lines = ['  '.join(column.ljust(width) for column, width in zip(RESULTS_COLUMNS, widths)).rstrip(),
             '  '.join('-' * width for width in widths)]
    for row in rows:
        lines.append('  '.join(row[column].ljust(width) for column, width in zip(RESULTS_COLUMNS, widths)).rstrip())
    return '\n'.join(lines) + '\n'
