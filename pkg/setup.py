"""Build script: compiles the mod-p matrix kernels to a C extension when
Cython is available; the package falls back to the numpy implementation
at import time if the extension is absent."""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension("thetagrade._kernels_cy", ["src/thetagrade/_kernels_cy.pyx"])
    ext_modules = cythonize(
        [ext],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
except Exception as exc:  # pragma: no cover - build environments without cython
    print(f"thetagrade: skipping compiled kernels ({exc}); pure-python fallback will be used")

setup(ext_modules=ext_modules)
