import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kernels fall back at import
    cythonize = None

extensions = []
if cythonize is not None and not os.environ.get("LEADERLESS_CRN_NO_EXT"):
    extensions = cythonize(
        [
            Extension(
                f"leaderless_crn.{name}",
                [f"src/leaderless_crn/{name}.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O2"],
            )
            for name in ("_ssa", "_explore")
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
