"""Build script: compiles the optional Monte Carlo kernel extension.

The extension is a performance accelerator only; the package falls back to
the pure numpy kernels when it is absent.  Set STEINMLE_NO_EXT=1 to skip
compilation entirely (e.g. on hosts without a C toolchain).
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("STEINMLE_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "steinmle.montecarlo._ckernels",
                    ["src/steinmle/montecarlo/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
