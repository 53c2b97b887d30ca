"""Build script: compiles the optional hot-loop extension.

The package works without the compiled module (a pure-Python fallback is
selected at import time), so any Cython/compiler failure downgrades to a
warning instead of aborting the install.
"""
import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/amdiqkd/_kernels/_core.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"Cython extension not built, using pure-Python kernels: {exc}")

setup(ext_modules=ext_modules)
