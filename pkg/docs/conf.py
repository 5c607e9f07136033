# -*- coding: utf-8 -*-
#
# Sphinx configuration of the django-scene-descriptors documentation.
import os
import sys

parent = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent)

import scene_descriptors  # noqa: E402

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'django-scene-descriptors'
copyright = u'2024, The django-scene-descriptors developers'

version = scene_descriptors.__version__
release = scene_descriptors.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'default'
html_static_path = []
htmlhelp_basename = 'django-scene-descriptorsdoc'

latex_documents = [
    ('index', 'django-scene-descriptors.tex', u'django-scene-descriptors Documentation',
     u'The django-scene-descriptors developers', 'manual'),
]

man_pages = [
    ('index', 'django-scene-descriptors', u'django-scene-descriptors Documentation',
     [u'The django-scene-descriptors developers'], 1)
]
