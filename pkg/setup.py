import os

import numpy as np
from setuptools import Extension, setup

# FACTORHD_NO_EXT=1 installs the pure-numpy fallback only.
ext_modules = []
if not os.environ.get("FACTORHD_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "factorhd._ckernels",
                ["src/factorhd/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )

setup(ext_modules=ext_modules)
