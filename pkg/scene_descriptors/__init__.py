# -*- coding: utf-8 -*-
__version__ = '0.1.0'

checkpoint_format_version = 1
descriptor_format_version = 1
