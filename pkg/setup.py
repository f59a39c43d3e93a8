"""Build script: compiles the optional Cython kernels.

The package is fully functional without the extension; a pure NumPy
backend is selected at import time when the compiled module is missing.
"""

import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise fall back silently."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernels ({exc}); "
                  "the pure NumPy backend will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "the pure NumPy backend will be used")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "orliczmeasure._kernels._solve",
                ["src/orliczmeasure/_kernels/_solve.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
