import os

from setuptools import setup

# The compiled split-scan kernel is optional: the package falls back to the
# pure NumPy implementation in engineid._kernels.pure when the extension is
# missing.  Set ENGINEID_PURE=1 to skip compilation entirely.
ext_modules = []
if os.environ.get("ENGINEID_PURE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext = Extension(
            "engineid._kernels._ckernels",
            ["src/engineid/_kernels/_ckernels.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            optional=True,
        )
        ext_modules = cythonize([ext], language_level="3")
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
