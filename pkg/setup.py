"""Build hook for the optional compiled scan kernel.

The package is fully functional without the extension; any compilation
failure downgrades to the numpy fallback instead of failing the install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/bestapprox/_scanker.pyx"],
        language_level=3,
    )
except Exception:
    ext_modules = []

try:
    setup(ext_modules=ext_modules)
except Exception:
    setup(ext_modules=[])
