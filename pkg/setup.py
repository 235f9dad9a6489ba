"""Build script: compiles the optional grid-sampling kernel.

The package is fully functional without the extension; kernels/__init__.py
falls back to a vectorized numpy implementation at import time.  Building
from sdist without Cython therefore still yields a working install.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "whitneylab.kernels._gridcore",
                ["src/whitneylab/kernels/_gridcore.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
