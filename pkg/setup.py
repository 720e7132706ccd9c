"""Build script: compiles the enumeration kernel when Cython and a C
compiler are available, and falls back to a pure-Python install otherwise
(the package selects the pure implementation at import time)."""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "quatlift._enumcore",
                sources=["src/quatlift/_enumcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
