# -*- coding: utf-8 -*-
"""
Procedural three-class scene corpus.

rural: smooth sky gradient over a wavy horizon and a green / brown ground
suburban: sky and lawn with scattered houses under triangular roofs
urban: gray facades cut by a dense axis-aligned window grid
"""
import logging
import os

import numpy as np

from . import constants
from .datasets import ImageSample, encode_ppm, manifest_bytes
from .exceptions import ConfigurationError
from .rng import Rng
from .utils import write_bytes_to_file

logger = logging.getLogger(__name__)

ROUTES_PER_CLASS = 2


def _coordinates(size):
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64) / size
    return yy, xx


def _blend(mask, color, canvas):
    return canvas * (1.0 - mask[None]) + np.asarray(color)[:, None, None] * mask[None]


def _rural(size, rng):
    yy, xx = _coordinates(size)
    frequency = 2 * np.pi * (1 + 2 * rng.uniform())
    horizon = 0.35 + 0.25 * rng.uniform() + 0.04 * np.sin(frequency * xx + 6.3 * rng.uniform())
    sky_top = np.array([0.35, 0.55, 0.85]) + 0.1 * (rng.uniform(3) - 0.5)
    sky_bottom = np.array([0.75, 0.85, 0.95]) + 0.05 * (rng.uniform(3) - 0.5)
    ground_near = np.array([0.25, 0.45, 0.15]) + 0.1 * (rng.uniform(3) - 0.5)
    ground_far = np.array([0.45, 0.4, 0.2]) + 0.1 * (rng.uniform(3) - 0.5)

    t_sky = np.clip(yy / np.maximum(horizon, 1e-3), 0, 1)
    sky = sky_top[:, None, None] * (1 - t_sky) + sky_bottom[:, None, None] * t_sky
    t_ground = np.clip((yy - horizon) / np.maximum(1 - horizon, 1e-3), 0, 1)
    ground = ground_far[:, None, None] * (1 - t_ground) + ground_near[:, None, None] * t_ground
    below = (yy >= horizon).astype(np.float64)
    return sky * (1 - below[None]) + ground * below[None]


def _suburban(size, rng):
    yy, xx = _coordinates(size)
    sky = np.array([0.55, 0.7, 0.9]) + 0.08 * (rng.uniform(3) - 0.5)
    canvas = np.broadcast_to(sky[:, None, None], (3, size, size)).copy()
    lawn_line = 0.55 + 0.1 * rng.uniform()
    lawn = np.array([0.3, 0.55, 0.25]) + 0.08 * (rng.uniform(3) - 0.5)
    canvas = _blend((yy >= lawn_line).astype(np.float64), lawn, canvas)

    for _ in range(3 + int(rng.integers(0, 3))):
        width = 0.15 + 0.1 * rng.uniform()
        height = 0.12 + 0.08 * rng.uniform()
        left = rng.uniform() * (1 - width)
        base = lawn_line + 0.05 + 0.3 * rng.uniform() * (1 - lawn_line)
        top = base - height
        wall = (xx >= left) & (xx < left + width) & (yy >= top) & (yy < base)
        canvas = _blend(wall.astype(np.float64), [0.85, 0.8, 0.65] + 0.1 * (rng.uniform(3) - 0.5), canvas)
        # Roof: triangle above the wall
        center = left + width / 2
        roof_height = height * (0.6 + 0.4 * rng.uniform())
        roof = (yy < top) & (yy >= top - roof_height) & \
            (np.abs(xx - center) <= (width / 2 + 0.02) * (yy - (top - roof_height)) / roof_height)
        canvas = _blend(roof.astype(np.float64), [0.65, 0.2, 0.15] + 0.1 * (rng.uniform(3) - 0.5), canvas)
    return canvas


def _urban(size, rng):
    yy, xx = _coordinates(size)
    gray = 0.4 + 0.2 * rng.uniform()
    canvas = np.full((3, size, size), gray) + 0.05 * (rng.uniform(3)[:, None, None] - 0.5)
    period = (4 + 4 * rng.uniform()) / 64.0
    thickness = period * (0.3 + 0.2 * rng.uniform())
    phase_x, phase_y = rng.uniform(2) * period
    windows = (((xx + phase_x) % period) < period - thickness) & (((yy + phase_y) % period) < period - thickness)
    shade = 0.15 + 0.2 * rng.uniform()
    canvas = _blend(windows.astype(np.float64), [shade, shade, shade + 0.05], canvas)
    # Street band at the bottom
    street = yy >= 0.85 + 0.1 * rng.uniform()
    return _blend(street.astype(np.float64), [0.25, 0.25, 0.27], canvas)


GENERATORS = {
    constants.RURAL: _rural,
    constants.SUBURBAN: _suburban,
    constants.URBAN: _urban,
}


def generate_synthetic_corpus(n_per_class, image_size, seed):
    """
    :param int n_per_class:
    :param int image_size:
    :param int seed:
    :return list: ImageSamples, class by class, alternating between two routes per class
    """
    if n_per_class < 1:
        raise ConfigurationError('n_per_class must be >= 1, got {}.'.format(n_per_class))
    if image_size < 8:
        raise ConfigurationError('image_size must be >= 8, got {}.'.format(image_size))

    samples = []
    for label, name in enumerate(constants.LABEL_NAMES):
        stream = _stream(seed, name)
        for index in range(n_per_class):
            pixels = GENERATORS[label](image_size, stream)
            pixels = pixels + 0.02 * (stream.uniform(pixels.shape) - 0.5)
            route = '{}-{}'.format(name, index % ROUTES_PER_CLASS)
            samples.append(ImageSample(id='{}/{}/{:04d}.ppm'.format(name, route, index),
                                       pixels=np.clip(pixels, 0.0, 1.0).astype(np.float32), label=label,
                                       route=route))
    logger.debug('generate_synthetic_corpus: {} images at {}x{}'.format(len(samples), image_size, image_size))
    return samples


def _stream(seed, name):
    return Rng(seed).spawn('synthetic').spawn(name)


def corpus_files(samples, manifest_name='manifest.csv'):
    """
    Yields (relative path, bytes) for each sample as a PPM file at its id, then for the manifest
    """
    for sample in samples:
        yield sample.id, encode_ppm(sample.pixels)
    yield manifest_name, manifest_bytes([{'path': sample.id, 'label': sample.label, 'route': sample.route}
                                         for sample in samples])


def write_corpus(samples, out_dir, manifest_name='manifest.csv'):
    """
    :return str: manifest path
    """
    for name, data in corpus_files(samples, manifest_name):
        write_bytes_to_file(os.path.join(out_dir, name), data, makedirs=True)
    return os.path.join(out_dir, manifest_name)
