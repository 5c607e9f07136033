# -*- coding: utf-8 -*-
import os
from abc import ABCMeta, abstractmethod
from collections import namedtuple

from django.utils.module_loading import import_string

from scene_descriptors import signals
from .settings import SCENE_ARTIFACT_STORE_CLASS
from .utils import create_checksum, write_bytes_to_file

Artifact = namedtuple('Artifact', ('name', 'path', 'sha256', 'size'))


class AbstractArtifactStore(metaclass=ABCMeta):
    """
    Destination of the files produced by the commands (checkpoints, descriptor files, reports, images)
    """

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.artifacts = []

    def path(self, name):
        return os.path.join(self.out_dir, name)

    @abstractmethod
    def handle_save(self, path, data):
        pass

    def save(self, name, data):
        """
        :param str name: Path relative to the store's output directory
        :param bytes data:
        :return Artifact:
        """
        path = self.path(name)
        self.handle_save(path, data)
        artifact = Artifact(name=name, path=path, sha256=create_checksum(data, 'sha256'), size=len(data))
        self.artifacts.append(artifact)

        # Trigger signal
        signals.artifact_saved.send(sender=self.__class__, artifact=artifact)
        return artifact

    def summary(self):
        return [{'name': artifact.name, 'path': artifact.path, 'sha256': artifact.sha256, 'size': artifact.size}
                for artifact in self.artifacts]


class DefaultArtifactStore(AbstractArtifactStore):
    def handle_save(self, path, data):
        write_bytes_to_file(path, data, makedirs=True)


def get_artifact_store(import_path=None):
    return import_string(import_path or SCENE_ARTIFACT_STORE_CLASS)
