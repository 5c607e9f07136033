# -*- coding: utf-8 -*-
"""
Seedable random streams.

Every stream is a PCG64 bit generator (O'Neill's permuted congruential generator, 128-bit state, 64-bit output)
seeded through numpy's SeedSequence, so a given seed yields the same bits on every platform. Normal variates are
produced with the Box-Muller transform on top of the uniform doubles instead of numpy's ziggurat sampler.
"""
import zlib

import numpy as np


def _stream_key(name):
    return zlib.crc32(name.encode('utf-8')) & 0xffffffff


class Rng(object):
    """
    A seeded random stream. Named child streams are statistically independent of their parent and of each other.
    """

    def __init__(self, seed=0, spawn_key=()):
        self.seed = int(seed) & 0xffffffffffffffff
        self.spawn_key = tuple(spawn_key)
        seed_sequence = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self._generator = np.random.Generator(np.random.PCG64(seed_sequence))

    def spawn(self, name):
        """
        Returns an independent stream derived from this stream's seed and the given name

        :param str name: Name of the child stream (e.g. "init", "shuffle")
        :return Rng:
        """
        return Rng(self.seed, self.spawn_key + (_stream_key(name),))

    def uniform(self, shape=None):
        """
        Uniform doubles in [0, 1)
        """
        return self._generator.random(shape)

    def normal(self, shape, dtype=np.float32):
        """
        Standard normal draws via Box-Muller

        :param int|tuple shape:
        :param dtype: Output dtype
        :return numpy.ndarray:
        """
        shape = (shape,) if np.isscalar(shape) else tuple(shape)
        count = int(np.prod(shape, dtype=np.int64))
        pairs = (count + 1) // 2
        # 1 - U lies in (0, 1], keeping the logarithm finite
        u1 = 1.0 - self._generator.random(pairs)
        u2 = self._generator.random(pairs)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        draws = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:count]
        return draws.reshape(shape).astype(dtype)

    def permutation(self, n):
        return self._generator.permutation(n)

    def integers(self, low, high=None, size=None):
        return self._generator.integers(low, high, size=size)
