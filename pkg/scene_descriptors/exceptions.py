# -*- coding: utf-8 -*-
from django.utils.translation import gettext_lazy as _
from rest_framework.exceptions import APIException


class SceneDescriptorError(APIException):
    """
    Base class for errors raised by scene_descriptors. ``detail`` and ``code`` default to the class level values.
    """
    default_detail = _('Scene descriptor error.')
    default_code = 'error'

    def __init__(self, detail=None, code=None):
        super(SceneDescriptorError, self).__init__(detail, code)
        self.code = code or self.default_code


class ShapeError(SceneDescriptorError, ValueError):
    default_detail = _('Shape mismatch.')
    default_code = 'shape_mismatch'


class NumericError(SceneDescriptorError, ArithmeticError):
    default_detail = _('Non-finite value encountered.')
    default_code = 'non_finite'


class TapeError(SceneDescriptorError, RuntimeError):
    default_detail = _('Invalid use of the gradient tape.')
    default_code = 'tape'


class ConfigurationError(SceneDescriptorError, ValueError):
    default_detail = _('Invalid configuration.')
    default_code = 'configuration'


class FormatError(SceneDescriptorError, ValueError):
    default_detail = _('Malformed file.')
    default_code = 'format'


class DatasetError(SceneDescriptorError, ValueError):
    default_detail = _('Invalid dataset.')
    default_code = 'dataset'


class TrainingError(SceneDescriptorError, RuntimeError):
    default_detail = _('Training aborted.')
    default_code = 'training'
