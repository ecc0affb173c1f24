# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.

# -- Path setup --------------------------------------------------------------

import os
import sys
sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))

THIS_FOLDER = os.path.dirname(os.path.abspath(__file__))

# -- Project information -----------------------------------------------------

project = 'gradcascade'
copyright = '2026, gradcascade developers'
author = 'gradcascade developers'

with open(os.path.join(THIS_FOLDER, '..', '..', '.version')) as f:
    release = f.read().strip()
version = release

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.viewcode',
    'sphinx.ext.githubpages',
    'sphinx.ext.intersphinx',
    'sphinx.ext.napoleon',
    'recommonmark',
]

templates_path = ['_templates']
source_suffix = ['.rst', '.md']
master_doc = 'index'
language = 'en'
exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------------

html_theme = 'alabaster'
html_sidebars = {
    '**': ['globaltoc.html', 'searchbox.html']
}
htmlhelp_basename = 'gradcascadedoc'

# -- Options for other outputs -----------------------------------------------

latex_documents = [
    (master_doc, 'gradcascade.tex', 'gradcascade Documentation', author, 'manual'),
]
man_pages = [
    (master_doc, 'gradcascade', 'gradcascade Documentation', [author], 1)
]

# -- Extension configuration -------------------------------------------------

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
}
todo_include_todos = True
