import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "vpmcf._kernels",
    ["src/vpmcf/_kernels.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3", "-fopenmp", "-ffp-contract=off"],
    extra_link_args=["-fopenmp"],
)

setup(ext_modules=cythonize([ext], language_level=3))
