# Sphinx configuration of the MOEVCS documentation.
import os

on_rtd = os.environ.get('READTHEDOCS', None) == 'True'
if not on_rtd:  # only import and set the theme if we're building docs locally
    import sphinx_rtd_theme
    html_theme = 'sphinx_rtd_theme'
    html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

extensions = []
source_suffix = '.rst'
master_doc = 'index'

project = u'MOEVCS'
copyright = u'2026, Mozilla Services'
version = '0.1'
release = '0.1.0'

exclude_patterns = ['_build']
pygments_style = 'sphinx'
htmlhelp_basename = 'MOEVCSdoc'
