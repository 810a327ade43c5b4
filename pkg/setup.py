"""Build script for the optional compiled kernel.

The extension is a speedup, not a requirement: if Cython or a C compiler
is missing the install still succeeds and the package falls back to the
pure-Python kernels at import time. -ffp-contract=off keeps the compiled
arithmetic bit-identical to the pure backend (no FMA contraction).
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler etc.
            print(f"warning: skipping compiled kernels ({exc}); "
                  "the pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "the pure-Python fallback will be used")


def extensions():
    if os.environ.get("MANGO_NAV_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "mango_nav._kernels._core",
                ["src/mango_nav/_kernels/_core.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
