import os

from setuptools import setup

ext_modules = []
if not os.environ.get("DYADT1_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "dyadt1.kernels._fast",
                    ["src/dyadt1/kernels/_fast.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: the package falls back to the pure-numpy kernels.
        ext_modules = []

setup(ext_modules=ext_modules)
