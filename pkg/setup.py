"""Build shim for the optional compiled kernels.

The package is fully functional without the extension (the pure-Python
kernels in ddlab._kernels_py are the fallback), so the build is marked
optional and any compiler failure degrades gracefully.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension(
        "ddlab._kernels",
        ["src/ddlab/_kernels.pyx"],
        language="c++",
    )
    ext.optional = True
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
