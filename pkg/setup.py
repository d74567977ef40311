"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a numpy fallback with identical
semantics is selected at import time), so any build failure here downgrades
to a warning instead of aborting the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: building the fcir_lab kernel extension failed ({exc}); "
            "falling back to the pure-numpy kernels",
            file=sys.stderr,
        )


def make_ext_modules():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        OptionalBuildExt._warn(exc)
        return []
    ext = Extension(
        "fcir_lab._kernels._native",
        ["src/fcir_lab/_kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=make_ext_modules(),
    cmdclass={"build_ext": OptionalBuildExt},
)
