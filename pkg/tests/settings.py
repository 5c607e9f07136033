# -*- coding: utf-8 -*-
import os

DEBUG = True
USE_TZ = True

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

SECRET_KEY = "scene-descriptors-tests"

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": ":memory:",
    }
}

INSTALLED_APPS = [
    "django.contrib.contenttypes",

    "rest_framework",
    "scene_descriptors",
]

# Commands under test always get an explicit --out-dir; this only catches strays
SCENE_DESCRIPTORS = {
    "OUT_DIR": os.path.join(BASE_DIR, "artifacts"),
}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "handlers": {
        "null": {
            "class": "logging.NullHandler",
        },
    },
    "loggers": {
        "scene_descriptors": {
            "handlers": ["null"],
            "level": "DEBUG",
        },
    },
}
