"""Build the optional compiled core.

If Cython or a C compiler is unavailable the package still installs and
``wavekit`` falls back to the pure numpy kernels at import time.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("WAVEKIT_NO_EXT", "") not in ("1", "true"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "wavekit._core",
                    ["src/wavekit/_core.pyx"],
                    include_dirs=[np.get_include()],
                    # no -ffast-math: the double-double kernels rely on strict IEEE rounding
                    extra_compile_args=["-O3", "-fno-math-errno"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
