"""Build script: compiles the optional Cython stepper extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "condelay._stepper",
                ["src/condelay/_stepper.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    import warnings

    warnings.warn("Cython/numpy unavailable at build time; installing pure-python only")
    ext_modules = []

setup(ext_modules=ext_modules)
