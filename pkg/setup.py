"""Build script for the optional compiled kernel.

The package is pure Python apart from ``dimgroup._boxkernel``, a small Cython
extension that accelerates the brute-force box-enumeration oracle used to
cross-check order embeddings.  When Cython (or a C compiler) is unavailable
the install still succeeds and the package transparently falls back to the
pure-Python kernel with identical semantics.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("dimgroup._boxkernel", ["src/dimgroup/_boxkernel.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
