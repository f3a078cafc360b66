"""Build script: compiles the Cython evaluation kernels when Cython is
available, otherwise installs pure-Python only (the package falls back to
the numpy kernels at import time)."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "acnmap._kernels",
                sources=["src/acnmap/_kernels.pyx"],
                # -ffp-contract=off keeps the compiled kernels bit-identical
                # to the numpy fallback (no FMA reassociation).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    extensions = []

setup(ext_modules=extensions)
