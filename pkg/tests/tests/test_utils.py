# -*- coding: utf-8 -*-
import json
import os
import tempfile
from unittest.case import TestCase

import numpy as np

from scene_descriptors.utils import create_checksum, dump_json, read_bytes, write_bytes_to_file


class UtilsTest(TestCase):
    def test_write_bytes_to_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'nested', 'out.bin')

            # Write
            write_bytes_to_file(path, b'abc', makedirs=True)
            write_bytes_to_file(path, b'defg')

            # Only the last write survives and no temporary file is left behind
            assert read_bytes(path) == b'defg'
            assert os.listdir(os.path.dirname(path)) == ['out.bin']

    def test_checksum(self):
        assert create_checksum(b'') == 'e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855'

        assert create_checksum(b'scene', 'sha256') != create_checksum(b'scenes', 'sha256')
        assert len(create_checksum(b'scene', 'md5')) == 32

    def test_dump_json(self):
        data = {'b': np.float32(0.5), 'a': np.arange(3), 'c': np.int64(7)}

        result = dump_json(data)

        # Keys are sorted and numpy values converted
        assert result == '{"a": [0, 1, 2], "b": 0.5, "c": 7}'
        assert json.loads(result)['c'] == 7
