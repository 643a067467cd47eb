"""Build script for the optional compiled simulation kernel.

The package is pure Python except for polyaurn._chain, a Cython version of
the urn chain stepping loop. If Cython (or a C compiler) is unavailable the
package still installs and falls back to polyaurn._chain_py at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("polyaurn._chain", ["src/polyaurn/_chain.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
