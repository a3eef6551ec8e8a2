# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

from datetime import datetime
import os
import sys
from sphinx.util import logging
logger = logging.getLogger(__name__)


# -- Path setup --------------------------------------------------------------

def get_scripts(directory):
    """
    Script modules of one category directory.
    """
    return sorted(f[:-3] for f in os.listdir(directory)
                  if f.endswith(".py") and not f.startswith("_"))


def find_scripts_entry(file_name):
    """
    Modules named by the automodule directives of an rst file.
    """
    with open(file_name) as f:
        return [line.split(".. automodule::")[1].strip()
                for line in f if "automodule" in line]


sys.path.insert(0, os.path.abspath('..'))
categories = ['data_scripts', 'planning_scripts', 'analysis_scripts',
              'figure_scripts']
missing = []
for category in categories:
    directory = os.path.join('..', 'quadlcd', category)
    sys.path.insert(0, directory)
    documented = set(find_scripts_entry("%s.rst" % category))
    missing.extend(s for s in get_scripts(directory) if s not in documented)
if missing:
    logger.warning("automodule entries missing for:\n" + '\n'.join(missing))

master_doc = 'index'

project = u'quadlcd'
now = datetime.now()
author = u'The quadlcd developers'
copyright = u'2024-%d, %s ' % (now.year, author)

# The full version, including alpha/beta/rc tags
version = '0.1.0.dev0'
release = version


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx_rtd_theme',
]

templates_path = ['_templates']

exclude_patterns = [u'_build', 'Thumbs.db', '.DS_Store']

# Build docs without the numerical stack installed
autodoc_mock_imports = ['numpy', 'scipy', 'matplotlib']

pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------------

html_theme = 'default'

html_static_path = []

latex_documents = [
    (master_doc, 'quadlcd.tex', u'quadlcd Documentation',
     author, 'manual'),
]

man_pages = [
    (master_doc, 'quadlcd', u'quadlcd Documentation', [author], 1)
]
