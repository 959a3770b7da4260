"""Build the optional compiled kernels.

If Cython or a C compiler is unavailable the package still installs; the
pure-numpy kernels in ``qdln._core.pure`` are used instead.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("QDLN_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        extensions = [
            Extension(
                "qdln._core._yee",
                ["src/qdln/_core/_yee.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            ),
            Extension(
                "qdln._core._coinc",
                ["src/qdln/_core/_coinc.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            ),
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
