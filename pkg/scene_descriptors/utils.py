# -*- coding: utf-8 -*-
import hashlib
import json
import os
import tempfile

import numpy as np


def write_bytes_to_file(file_path, bytes, makedirs=False):
    """
    Util to (atomically) replace the contents of a local file

    :param str file_path:
    :param bytes bytes:
    :param bool makedirs: Whether or not to create the file_path's directories if they don't exist
    :return int: The amount of bytes written
    """
    directory = os.path.dirname(os.path.abspath(file_path))
    if makedirs and not os.path.isdir(directory):
        os.makedirs(directory)

    fd, temporary_path = tempfile.mkstemp(prefix='.scene-', dir=directory)
    try:
        with os.fdopen(fd, 'wb') as fh:
            num_bytes_written = fh.write(bytes)
        os.replace(temporary_path, file_path)
    except Exception:
        if os.path.exists(temporary_path):
            os.remove(temporary_path)
        raise

    return num_bytes_written


def read_bytes(path):
    """
    Returns the bytes read from a local file at the given path

    :param str path: The local path to the file to read
    :return bytes:
    """
    with open(path, 'rb') as fh:
        result = fh.read()
    return result


def create_checksum(bytes, checksum_algorithm='sha256'):
    """
    Create a hex-checksum for the given bytes using the given algorithm

    :param bytes bytes: The bytes to create the checksum for
    :param str checksum_algorithm: The algorithm to use (e.g. "sha256")
    :return str: The checksum (hex)
    """
    m = hashlib.new(checksum_algorithm)
    m.update(bytes)
    return m.hexdigest()


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError('Object of type {} is not JSON serializable'.format(type(value).__name__))


def dump_json(data, indent=None):
    """
    Deterministic JSON text (sorted keys, numpy values converted)

    :param data:
    :param int indent:
    :return str:
    """
    return json.dumps(data, sort_keys=True, indent=indent, default=_json_default)
