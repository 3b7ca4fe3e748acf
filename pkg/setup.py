import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# These flags keep the compiled kernels bit-identical to the pure Python
# fallback: -ffp-contract=off stops fused multiply-adds, which round
# differently from separate multiply and add, and -fno-builtin-sin/-cos
# stops gcc from pairing adjacent sin/cos calls into glibc sincos(),
# whose results can differ from sin()/cos() in the last ulp.
extensions = [
    Extension(
        "sliptrack._core._kernels",
        ["src/sliptrack/_core/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=[
            "-O3", "-ffp-contract=off", "-fno-builtin-sin", "-fno-builtin-cos",
        ],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
