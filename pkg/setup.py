#!/usr/bin/env python
# -*- coding: utf-8 -*-
import os
import re
import sys

from setuptools import find_packages, setup


def get_version(*file_paths):
    """Retrieves the version from scene_descriptors/__init__.py"""
    filename = os.path.join(os.path.dirname(__file__), *file_paths)
    with open(filename) as fh:
        version_file = fh.read()
    version_match = re.search(r"^__version__ = ['\"]([^'\"]*)['\"]",
                              version_file, re.M)
    if version_match:
        return version_match.group(1)
    raise RuntimeError('Unable to find version string.')


version = get_version("scene_descriptors", "__init__.py")


if sys.argv[-1] == 'tag':
    print("Tagging the version on git:")
    os.system("git tag -a %s -m 'version %s'" % (version, version))
    os.system("git push --tags")
    sys.exit()

with open('README.rst') as fh:
    readme = fh.read()
with open('HISTORY.rst') as fh:
    history = fh.read().replace('.. :changelog:', '')

setup(
    name='django-scene-descriptors',
    version=version,
    description="""Unsupervised VAE scene descriptors, PHOG and random baselines, and a linear-probe benchmark""",
    long_description=readme + '\n\n' + history,
    packages=find_packages(exclude=['tests', 'tests.*']),
    include_package_data=True,
    python_requires='>=3.7',
    install_requires=[
        'Django>=3.2',
        'djangorestframework>=3.12.0',
        'jsonfield>=3.1.0',
        'django-fsm>=2.7.0',
        'numpy>=1.17.0',
        'scipy>=1.5.0',
        'Pillow>=8.0.0',
    ],
    entry_points={
        'console_scripts': [
            'scene-descriptors=scene_descriptors.cli:main',
        ],
    },
    license="MIT",
    zip_safe=False,
    keywords='scene-descriptors vae phog place-recognition',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Framework :: Django',
        'Framework :: Django :: 3.2',
        'Framework :: Django :: 4.2',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Image Recognition',
    ],
)
