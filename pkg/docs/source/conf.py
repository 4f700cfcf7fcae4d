# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.
#
# For a full list of options see the documentation:
# http://www.sphinx-doc.org/en/master/config

# -- Path setup --------------------------------------------------------------

import os
import sys

# path to the package, not the source (e.g. ~/Applications/fedalign)
sys.path.append(os.path.abspath('../../'))


# -- Project information -----------------------------------------------------

project = 'fedalign'
copyright = '2026, fedalign developers'
author = 'fedalign developers'

# The short X.Y version
version = '0.1'
# The full version, including alpha/beta/rc tags
release = "0.1.0"


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.imgmath',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
language = None
exclude_patterns = []
pygments_style = 'default'


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
htmlhelp_basename = 'fedaligndoc'


# -- Options for LaTeX output ------------------------------------------------

latex_elements = {}
latex_documents = [
    (master_doc, 'fedalign.tex', 'fedalign Documentation', author, 'manual')
]


# -- Options for manual page output ------------------------------------------

man_pages = [(master_doc, 'fedalign', 'fedalign Documentation', [author], 1)]


# -- Mock setup --------------------------------------------------------------
# Modules to be mocked up when they are not installed at build time.
autodoc_mock_imports = ['numpy', 'scipy', 'scipy.optimize', 'scipy.special']

# do not sort member functions of a class
autodoc_member_order = 'bysource'

# -- Math setup --------------------------------------------------------------
imgmath_image_format = 'svg'
imgmath_latex_preamble = '\\usepackage{bm} \\usepackage{amsmath}'
