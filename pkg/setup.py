"""Build script: compiles the optional flow kernel extension.

The package works without the extension (a pure-Python kernel is selected
at import time), so the build is marked optional and any compiler failure
degrades to a pure install.
"""

import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("CLASSMATCH_NO_EXT"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "classmatch._fastflow",
                    ["src/classmatch/_fastflow.pyx"],
                    optional=True,
                )
            ],
            language_level="3",
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions)
