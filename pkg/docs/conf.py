# -*- coding: utf-8 -*-
#
# measfem documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os
import sphinx_rtd_theme

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath('..'))
import measfem

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon'
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'measfem'
copyright = u'2026, The measfem developers'

# The short X.Y version.
version = '.'.join(measfem.__version__.split('.')[:2])
# The full version, including alpha/beta/rc tags.
release = measfem.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = ['_static']
htmlhelp_basename = 'measfemdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'measfem.tex', u'measfem Documentation',
   u'The measfem developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'measfem', u'measfem Documentation',
     [u'The measfem developers'], 1)
]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
  ('index', 'measfem', u'measfem Documentation',
   u'The measfem developers', 'measfem',
   'Finite elements for elliptic problems with measure data.', 'Miscellaneous'),
]

intersphinx_mapping = {'http://docs.python.org/': None}
