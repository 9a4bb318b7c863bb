"""Build script for the optional compiled eigensolver kernel.

The package is fully functional without the extension: the kernel package
falls back to a pure-Python implementation of the same algorithm at import
time.  Any compiler or Cython failure therefore downgrades to a warning
instead of aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    import numpy as np
except ImportError:  # pragma: no cover - numpy is a hard runtime dependency
    np = None

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None


class optional_build_ext(build_ext):
    """build_ext that warns instead of failing when compilation breaks."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"compiled kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel skipped: {exc}")


ext_modules = []
if cythonize is not None and np is not None:
    ext_modules = cythonize(
        [
            Extension(
                "dephaselab._kernels._jacobi_cy",
                ["src/dephaselab/_kernels/_jacobi_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
