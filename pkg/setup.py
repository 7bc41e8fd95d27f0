"""Build hook for the optional compiled arithmetic core.

The package is fully functional without the extension (the pure-Python
backend is selected at import); a failed compile therefore downgrades to
a warning instead of failing the install.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            warnings.warn(f"compiled backend skipped ({exc}); using the pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"compiled backend skipped ({exc}); using the pure-Python backend")


def extensions():
    import os

    if not os.path.exists("src/otsske/backend/_core.pyx"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython unavailable; building without the compiled backend")
        return []
    from setuptools import Extension

    ext = Extension(
        "otsske.backend._core",
        ["src/otsske/backend/_core.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
