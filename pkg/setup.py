"""Build shim for the optional compiled kernel.

The package is fully functional without the extension; a NumPy fallback with
identical semantics is selected at import time when the compiled core is
missing.  Set MEANCOVER_SKIP_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("MEANCOVER_SKIP_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "meancover._kernels._core",
                    ["src/meancover/_kernels/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
