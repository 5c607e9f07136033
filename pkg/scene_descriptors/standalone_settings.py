# -*- coding: utf-8 -*-
"""
Django settings used by the ``scene-descriptors`` console script when no DJANGO_SETTINGS_MODULE is set.
"""
import os

DEBUG = False
USE_TZ = True

BASE_DIR = os.getcwd()

SECRET_KEY = 'scene-descriptors-standalone'

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('SCENE_DESCRIPTORS_DB', ':memory:'),
    }
}

INSTALLED_APPS = [
    'django.contrib.contenttypes',

    'rest_framework',
    'scene_descriptors',
]

SCENE_DESCRIPTORS = {
    'OUT_DIR': os.environ.get('SCENE_DESCRIPTORS_OUT_DIR', os.path.join(BASE_DIR, 'artifacts')),
}

# Everything goes to stderr; stdout carries the JSON summaries only
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['stderr'],
        'level': os.environ.get('SCENE_DESCRIPTORS_LOG_LEVEL', 'WARNING'),
    },
    'loggers': {
        'scene_descriptors': {
            'handlers': ['stderr'],
            'level': os.environ.get('SCENE_DESCRIPTORS_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
