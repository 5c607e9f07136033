# -*- coding: utf-8 -*-
"""
The "VAEC" checkpoint container.

Layout (little-endian)::

    b"VAEC" | u32 format version | u32 tensor count
    per tensor: u16 name length | UTF-8 name | u8 ndim | ndim x u32 dims | float32 payload
    trailing UTF-8 JSON blob (configuration, with a "kind" tag: "vae" or "probe")
"""
import json
import struct

import numpy as np

from . import checkpoint_format_version, constants
from .exceptions import FormatError
from .utils import read_bytes


_HEADER = struct.Struct('<4sII')
_NAME_LENGTH = struct.Struct('<H')
_NDIM = struct.Struct('<B')


def serialize_checkpoint(tensors, config, kind=constants.CHECKPOINT_KIND_VAE):
    """
    :param dict tensors: name -> array, written in insertion order
    :param dict config: JSON-serializable configuration
    :param str kind: Container tag
    :return bytes:
    """
    chunks = [_HEADER.pack(constants.CHECKPOINT_MAGIC, checkpoint_format_version, len(tensors))]
    for name, array in tensors.items():
        encoded_name = name.encode('utf-8')
        array = np.ascontiguousarray(array, dtype='<f4')
        chunks.append(_NAME_LENGTH.pack(len(encoded_name)))
        chunks.append(encoded_name)
        chunks.append(_NDIM.pack(array.ndim))
        chunks.append(struct.pack('<{}I'.format(array.ndim), *array.shape))
        chunks.append(array.tobytes())

    blob = dict(config)
    blob['kind'] = kind
    chunks.append(json.dumps(blob, sort_keys=True).encode('utf-8'))
    return b''.join(chunks)


def _take(data, offset, size, what):
    if offset + size > len(data):
        raise FormatError('Truncated checkpoint while reading {}.'.format(what))
    return data[offset:offset + size], offset + size


def deserialize_checkpoint(data, kind=None):
    """
    :param bytes data:
    :param str kind: When given, the container tag must match
    :return tuple: (dict name -> float32 array, dict config)
    """
    header, offset = _take(data, 0, _HEADER.size, 'header')
    magic, version, count = _HEADER.unpack(header)
    if magic != constants.CHECKPOINT_MAGIC:
        raise FormatError('Not a checkpoint: bad magic {!r}.'.format(magic))
    if version != checkpoint_format_version:
        raise FormatError('Unsupported checkpoint version {}.'.format(version))

    tensors = {}
    for _ in range(count):
        raw, offset = _take(data, offset, _NAME_LENGTH.size, 'name length')
        name_length, = _NAME_LENGTH.unpack(raw)
        raw, offset = _take(data, offset, name_length, 'name')
        name = raw.decode('utf-8')
        raw, offset = _take(data, offset, _NDIM.size, 'ndim')
        ndim, = _NDIM.unpack(raw)
        raw, offset = _take(data, offset, 4 * ndim, 'dims')
        shape = struct.unpack('<{}I'.format(ndim), raw)
        raw, offset = _take(data, offset, 4 * int(np.prod(shape, dtype=np.int64)), 'payload of "{}"'.format(name))
        tensors[name] = np.frombuffer(raw, dtype='<f4').astype(np.float32).reshape(shape)

    try:
        config = json.loads(data[offset:].decode('utf-8'))
    except ValueError:
        raise FormatError('Checkpoint configuration blob is not valid JSON.')
    if kind is not None and config.get('kind') != kind:
        raise FormatError('Expected a "{}" checkpoint, got "{}".'.format(kind, config.get('kind')))
    return tensors, config


def load_checkpoint(path, kind=None):
    return deserialize_checkpoint(read_bytes(path), kind=kind)
