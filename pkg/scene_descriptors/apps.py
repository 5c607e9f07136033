# -*- coding: utf-8
from django.apps import AppConfig


class SceneDescriptorsConfig(AppConfig):
    name = 'scene_descriptors'
    default_auto_field = 'django.db.models.AutoField'

    # noinspection PyUnresolvedReferences
    def ready(self):
        # Import receivers
        from . import receivers
