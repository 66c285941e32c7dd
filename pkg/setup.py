from setuptools import setup, Extension
from Cython.Build import cythonize
import numpy as np

ext = Extension(
    "approxtree._kernels._evalcore",
    ["src/approxtree/_kernels/_evalcore.pyx"],
    include_dirs=[np.get_include()],
)

setup(ext_modules=cythonize([ext], language_level=3))
