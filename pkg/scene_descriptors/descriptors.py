# -*- coding: utf-8 -*-
"""
Descriptor containers, the PHOG and random baselines, and the "DSC1" descriptor file.

DSC1 layout (little-endian): b"DSC1" | u32 count | u32 dim | u8 source tag | count x dim float32 values.
Image ids, labels and routes live in a UTF-8 CSV sidecar (``<path>.csv``, header ``id,label,route``) in file order.
"""
import csv
import io
import logging
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import ndimage

from . import constants, descriptor_format_version
from .datasets import to_grayscale
from .exceptions import ConfigurationError, DatasetError, FormatError, NumericError, ShapeError
from .settings import SCENE_PHOG_BINS, SCENE_PHOG_LEVELS, SCENE_PHOG_ORIENTATION_RANGE
from .utils import read_bytes, write_bytes_to_file

logger = logging.getLogger(__name__)

_HEADER = struct.Struct('<4sIIB')

SIDECAR_HEADER = ('id', 'label', 'route')


@dataclass
class PhogConfig:
    bins: int = SCENE_PHOG_BINS
    levels: int = SCENE_PHOG_LEVELS
    orientation_range: int = SCENE_PHOG_ORIENTATION_RANGE

    def __post_init__(self):
        if self.bins < 1 or self.levels < 1:
            raise ConfigurationError('PHOG bins and levels must be positive, got {} and {}.'.format(
                self.bins, self.levels))
        if self.orientation_range not in (180, 360):
            raise ConfigurationError('orientation_range must be 180 or 360, got {}.'.format(self.orientation_range))

    @property
    def length(self):
        return self.bins * sum(4 ** level for level in range(self.levels))


@dataclass
class Descriptor:
    values: np.ndarray
    source: str
    image_id: str = ''

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ShapeError('A descriptor must be a non-empty vector, got shape {}.'.format(self.values.shape))
        if not np.isfinite(self.values).all():
            raise NumericError('Descriptor "{}" has non-finite values.'.format(self.image_id))
        if self.source not in constants.SOURCE_TAGS:
            raise ConfigurationError('Unknown descriptor source "{}".'.format(self.source))


@dataclass
class DescriptorSet:
    """
    Length-homogeneous descriptors of one source, with per-row ids and optional labels and routes
    """
    values: np.ndarray
    source: str
    ids: List[str] = field(default_factory=list)
    labels: List[Optional[int]] = field(default_factory=list)
    routes: List[Optional[str]] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.ndim != 2:
            raise ShapeError('Descriptor values must be [count, dim], got {}.'.format(self.values.shape))
        count = self.values.shape[0]
        self.ids = list(self.ids) or [str(index) for index in range(count)]
        self.labels = list(self.labels) or [None] * count
        self.routes = list(self.routes) or [None] * count
        if not len(self.ids) == len(self.labels) == len(self.routes) == count:
            raise ShapeError('Descriptor metadata does not match {} rows.'.format(count))
        if self.source not in constants.SOURCE_TAGS:
            raise ConfigurationError('Unknown descriptor source "{}".'.format(self.source))

    def __len__(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]

    @classmethod
    def from_descriptors(cls, descriptors, labels=None, routes=None, source=None):
        descriptors = list(descriptors)
        lengths = {descriptor.values.size for descriptor in descriptors}
        if len(lengths) > 1:
            raise ShapeError('Descriptor lengths differ: {}.'.format(sorted(lengths)))
        sources = {descriptor.source for descriptor in descriptors}
        if len(sources) > 1:
            raise ConfigurationError('Descriptors mix sources: {}.'.format(sorted(sources)))
        source = source or (sources.pop() if sources else constants.SOURCE_EXTERNAL)
        values = np.stack([d.values for d in descriptors]) if descriptors else np.zeros((0, 0), np.float32)
        return cls(values=values, source=source, ids=[d.image_id for d in descriptors],
                   labels=labels or [], routes=routes or [])

    def descriptors(self):
        return [Descriptor(values=row, source=self.source, image_id=identifier)
                for row, identifier in zip(self.values, self.ids)]

    def label_array(self):
        if any(label is None for label in self.labels):
            raise DatasetError('Some descriptors carry no label.')
        return np.asarray(self.labels, dtype=np.int64)

    def subset(self, ids):
        """
        Rows whose id is in ``ids``, in this set's order
        """
        wanted = set(ids)
        return self.take([index for index, identifier in enumerate(self.ids) if identifier in wanted])

    def take(self, rows):
        """
        Rows at the given positions, in the given order
        """
        rows = list(rows)
        return DescriptorSet(values=self.values[rows].reshape(len(rows), self.dim), source=self.source,
                             ids=[self.ids[index] for index in rows], labels=[self.labels[index] for index in rows],
                             routes=[self.routes[index] for index in rows])


def phog(image, config=None, image_id=''):
    """
    Pyramid histogram of oriented gradients.

    Sobel gradients give a magnitude and an orientation in [0, orientation_range) per pixel; each pixel votes its
    magnitude into the single containing orientation bin of its cell, at pyramid levels 0..levels-1 (1, 4, 16, ...
    cells, with integer cell edges so levels nest exactly). Levels are concatenated coarse to fine and the whole
    vector is L1-normalized; gradient-free images give the zero vector.

    :param numpy.ndarray image: Grayscale [H, W]
    :param PhogConfig config:
    :param str image_id:
    :return Descriptor:
    """
    config = config or PhogConfig()
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ShapeError('phog: expected a grayscale [H, W] image, got shape {}.'.format(image.shape))
    height, width = image.shape
    smallest = 2 ** (config.levels - 1)
    if height < smallest or width < smallest:
        raise ShapeError('phog: image {}x{} is smaller than the finest pyramid level ({} cells per side).'.format(
            height, width, smallest))

    histogram = phog_levels(image, config)
    total = histogram.sum()
    if total > 0:
        histogram = histogram / total
    return Descriptor(values=histogram.astype(np.float32), source=constants.SOURCE_PHOG, image_id=image_id)


def _orientation_bins(image, config):
    gx = ndimage.sobel(image, axis=1, mode='nearest')
    gy = ndimage.sobel(image, axis=0, mode='nearest')
    magnitude = np.hypot(gx, gy)
    angle = np.degrees(np.arctan2(gy, gx)) % config.orientation_range
    bins = np.minimum((angle * (config.bins / config.orientation_range)).astype(np.int64), config.bins - 1)
    return bins, magnitude


def phog_levels(image, config):
    """
    Unnormalized concatenated histograms, level 0 first

    :return numpy.ndarray: float64 vector of length config.length
    """
    bins, magnitude = _orientation_bins(image, config)
    height, width = image.shape
    levels = []
    for level in range(config.levels):
        cells = 2 ** level
        row_cell = np.searchsorted((height * np.arange(1, cells)) // cells, np.arange(height), side='right')
        col_cell = np.searchsorted((width * np.arange(1, cells)) // cells, np.arange(width), side='right')
        cell = row_cell[:, None] * cells + col_cell[None, :]
        index = (cell * config.bins + bins).ravel()
        levels.append(np.bincount(index, weights=magnitude.ravel(), minlength=cells * cells * config.bins))
    return np.concatenate(levels)


def phog_set(samples, config=None, threads=1):
    """
    PHOG of every sample (converted to grayscale), fanned out over ``threads``

    :return DescriptorSet:
    """
    config = config or PhogConfig()
    samples = list(samples)

    def describe(sample):
        return phog(to_grayscale(sample.pixels), config, image_id=sample.id)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            descriptors = list(pool.map(describe, samples))
    else:
        descriptors = [describe(sample) for sample in samples]
    return DescriptorSet.from_descriptors(descriptors, labels=[s.label for s in samples],
                                          routes=[s.route for s in samples])


def random_descriptor(dim, rng, image_id=''):
    """
    ``dim`` i.i.d. standard-normal draws

    :param int dim:
    :param Rng rng: A stream dedicated to random descriptors
    :return Descriptor:
    """
    if dim < 1:
        raise ConfigurationError('dim must be >= 1, got {}.'.format(dim))
    return Descriptor(values=rng.normal(dim), source=constants.SOURCE_RANDOM, image_id=image_id)


def _field(sample, name):
    return getattr(sample, name) if hasattr(sample, name) else sample.get(name)


def random_set(samples, dim, rng):
    """
    :param list samples: ImageSamples or manifest rows; only their id, label and route are used
    """
    samples = list(samples)
    stream = rng.spawn('random-descriptor')
    descriptors = [random_descriptor(dim, stream, image_id=_field(sample, 'id')) for sample in samples]
    return DescriptorSet.from_descriptors(descriptors, labels=[_field(s, 'label') for s in samples],
                                          routes=[_field(s, 'route') for s in samples], source=constants.SOURCE_RANDOM)


def crop_descriptors(descriptor_set, dim):
    """
    Keeps the leading ``dim`` components of every row and L2-normalizes the result (zero rows stay zero)

    :return DescriptorSet:
    """
    if not 1 <= dim <= descriptor_set.dim:
        raise ConfigurationError('Cannot crop {}-d descriptors to {}.'.format(descriptor_set.dim, dim))
    cropped = descriptor_set.values[:, :dim].astype(np.float64)
    norms = np.linalg.norm(cropped, axis=1, keepdims=True)
    cropped = np.divide(cropped, norms, out=np.zeros_like(cropped), where=norms > 0)
    return DescriptorSet(values=cropped.astype(np.float32), source=descriptor_set.source, ids=descriptor_set.ids,
                         labels=descriptor_set.labels, routes=descriptor_set.routes)


def serialize_descriptor_set(descriptor_set):
    """
    :return tuple: (DSC1 bytes, sidecar CSV bytes)
    """
    tag = constants.SOURCE_TAGS[descriptor_set.source]
    count, dim = descriptor_set.values.shape
    data = _HEADER.pack(constants.DESCRIPTOR_MAGIC, count, dim, tag) + \
        np.ascontiguousarray(descriptor_set.values, dtype='<f4').tobytes()

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(SIDECAR_HEADER)
    for identifier, label, route in zip(descriptor_set.ids, descriptor_set.labels, descriptor_set.routes):
        writer.writerow([identifier, '' if label is None else constants.LABEL_NAMES[label], route or ''])
    return data, buffer.getvalue().encode('utf-8')


def deserialize_descriptor_set(data, sidecar=None):
    if len(data) < _HEADER.size:
        raise FormatError('Truncated descriptor file header.')
    magic, count, dim, tag = _HEADER.unpack_from(data)
    if magic[:3] != constants.DESCRIPTOR_MAGIC[:3]:
        raise FormatError('Not a descriptor file: bad magic {!r}.'.format(magic))
    if magic != constants.DESCRIPTOR_MAGIC:
        raise FormatError('Unsupported descriptor file version {!r} (expected {}).'.format(
            magic[3:], descriptor_format_version))
    sources = {value: key for key, value in constants.SOURCE_TAGS.items()}
    if tag not in sources:
        raise FormatError('Unknown descriptor source tag {}.'.format(tag))
    expected = count * dim * 4
    payload = data[_HEADER.size:]
    if len(payload) != expected:
        raise FormatError('Descriptor payload holds {} bytes, expected {}.'.format(len(payload), expected))
    values = np.frombuffer(payload, dtype='<f4').astype(np.float32).reshape(count, dim)

    ids, labels, routes = [], [], []
    if sidecar is not None:
        reader = csv.DictReader(io.StringIO(sidecar.decode('utf-8')))
        if 'id' not in (reader.fieldnames or ()):
            raise FormatError('Sidecar has no "id" column.')
        for line, row in enumerate(reader, start=2):
            ids.append(row['id'])
            label = (row.get('label') or '').strip()
            try:
                labels.append(constants.LABELS[label] if label else None)
            except KeyError:
                raise FormatError('Sidecar line {}: unknown label "{}" (expected one of {}).'.format(
                    line, label, ', '.join(constants.LABEL_NAMES)))
            routes.append(row.get('route') or None)
        if len(ids) != count:
            raise FormatError('Sidecar lists {} ids for {} descriptors.'.format(len(ids), count))
    return DescriptorSet(values=values, source=sources[tag], ids=ids, labels=labels, routes=routes)


def sidecar_path(path):
    return path + '.csv'


def write_descriptor_set(path, descriptor_set):
    data, sidecar = serialize_descriptor_set(descriptor_set)
    write_bytes_to_file(path, data, makedirs=True)
    write_bytes_to_file(sidecar_path(path), sidecar, makedirs=True)
    logger.debug('write_descriptor_set: {} ({} x {})'.format(path, len(descriptor_set), descriptor_set.values.shape[1]))
    return data, sidecar


def read_descriptor_set(path):
    try:
        sidecar = read_bytes(sidecar_path(path))
    except IOError:
        sidecar = None
    return deserialize_descriptor_set(read_bytes(path), sidecar)
