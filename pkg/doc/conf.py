# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

sys.path.insert(0, os.path.abspath('..'))


# -- Project information -----------------------------------------------------

project = u'rebh'
copyright = u'2026, the rebh developers'
author = u'the rebh developers'


def get_version(root_dir):
    with open(os.path.join(root_dir, 'VERSION')) as version_file:
        version = version_file.read().strip()
    return version


# The short X.Y version.
version = get_version("../rebh")
# The full version, including alpha/beta/rc tags.
release = version


# -- General configuration ---------------------------------------------------

# Error on warnings/missing links, etc
nitpicky = True
nitpick_ignore = [
    ('py:class', 'numpy.ndarray'),
    ('py:class', 'np.ndarray'),
    ('py:class', 'pd.DataFrame'),
    ('py:class', 'NoneType'),
    ('py:class', 'array-like'),
    ('py:class', 'optional'),
]

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.napoleon',
    'sphinx_rtd_theme',  # Read-the-docs theme
    'sphinx.ext.mathjax',  # For displaying math in html output
    'sphinx.ext.intersphinx',
]

# Napoleon config
napoleon_numpy_docstring = True
napoleon_google_docstring = False
napoleon_use_rtype = False

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'sphinx'


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_options = {
    'collapse_navigation': False,
    'display_version': True,
}
htmlhelp_basename = 'rebhdoc'
html_static_path = ['_static']
html_sidebars = {'**': ['globaltoc.html', 'localtoc.html', 'searchbox.html']}

intersphinx_mapping = {
    'python': ('https://docs.python.org/{.major}'.format(sys.version_info), None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/reference', None),
    'pandas': ('https://pandas.pydata.org/docs/', None),
}
