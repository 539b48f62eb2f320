"""Optional build of the compiled kernels.

If Cython or a compiler is unavailable the package still installs and runs
on the pure Python fallback in ``gapstress._kernels_py``.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("gapstress._ckernels", ["src/gapstress/_ckernels.pyx"],
                   include_dirs=[numpy.get_include()],
                   define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
        quiet=True,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
