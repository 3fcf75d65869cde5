import numpy
from Cython.Build import cythonize
from setuptools import setup, Extension

# _kernels/core.py is written in Cython "pure Python" mode: the same source
# runs interpreted (fallback backend) and compiles to a C extension (fast
# backend). The compiled module is installed as occlusim._kernels._core_c.
ext = Extension(
    "occlusim._kernels._core_c",
    sources=["src/occlusim/_kernels/_core_c.py"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3"],
)

setup(
    ext_modules=cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
)
