import os

import numpy as np
from setuptools import Extension, setup

# The compiled line-integral kernel is optional; the package falls back to a
# NumPy implementation when the extension is missing.
ext_modules = []
if os.environ.get("TENSORTOMO_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "tensortomo._lineint",
            ["src/tensortomo/_lineint.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize(
            [ext], compiler_directives={"language_level": "3"}
        )

setup(ext_modules=ext_modules)
