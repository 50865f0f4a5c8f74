"""Build the optional compiled integrator core.

The package works without the extension (a pure-Python twin is selected at
import time), so a missing compiler or Cython must not break installation.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "ibgsg._kernels",
                ["src/ibgsg/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - degraded build path
    import sys

    print(f"ibgsg: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
