from setuptools import setup, Extension
from Cython.Build import cythonize
import numpy as np


# -ffp-contract=off keeps the C arithmetic bit-compatible with the pure
# Python backend (no fused multiply-add), which the parity tests rely on.
ext_module = Extension(
    "hopfknot._kernels",
    ["src/hopfknot/_kernels.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

setup(
    ext_modules=cythonize(ext_module, language_level=3),
)
