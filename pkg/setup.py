"""Build hook for the optional compiled exploration core.

The package works without the extension (a pure-Python engine is selected at
import time); the extension just makes large explorations a lot faster.
"""

import os

from setuptools import setup

_PYX = "src/ebench/engine/_core.pyx"

try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    if os.path.exists(_PYX):
        extensions = cythonize(
            [Extension("ebench.engine._core", sources=[_PYX], extra_compile_args=["-O3"])],
            language_level=3,
        )
    else:
        extensions = []
except ImportError:
    extensions = []

setup(ext_modules=extensions)
