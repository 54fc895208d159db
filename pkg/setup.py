"""Build script: compiles the optional simplex pivot kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so a missing compiler or Cython must not break
installation.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/reluregions/_simplex_c.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"reluregions: skipping compiled kernel ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
