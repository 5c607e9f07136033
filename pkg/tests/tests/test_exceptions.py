# -*- coding: utf-8 -*-
from unittest.case import TestCase

from rest_framework.exceptions import APIException

from scene_descriptors.exceptions import FormatError, NumericError, SceneDescriptorError


class ExceptionsTest(TestCase):
    def test_defaults(self):
        error = FormatError()

        assert isinstance(error, SceneDescriptorError)
        assert isinstance(error, APIException)
        assert isinstance(error, ValueError)
        assert str(error) == 'Malformed file.'
        assert error.code == 'format'
        assert error.detail.code == 'format'

    def test_detail_and_code(self):
        error = NumericError('loss is nan', code='nan_loss')

        assert isinstance(error, ArithmeticError)
        assert str(error) == 'loss is nan'
        assert error.code == 'nan_loss'

        with self.assertRaises(ValueError):
            raise FormatError('bad magic')
