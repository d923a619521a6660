"""Build script: compiles the optional sweep-kernel extension.

The package works without the extension (a pure-NumPy fallback is selected
at import time); set WTNCUR_PURE=1 to skip the build entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("WTNCUR_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "wtncur._fastcore",
                    ["src/wtncur/_fastcore.pyx"],
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
