"""Build script: compiles the optional Cython propagation kernels.

The package works without the extension (a pure-NumPy fallback is selected
at import time), so any build failure here is demoted to a warning.
"""
import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/drivephase/kernels/_fast.pyx",
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except Exception as exc:  # pragma: no cover - build-env dependent
    warnings.warn(f"Cython kernels not built ({exc}); pure-NumPy fallback will be used")

setup(ext_modules=ext_modules)
