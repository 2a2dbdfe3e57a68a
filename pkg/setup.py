import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # The package runs on the pure-numpy kernel backend when the compiled
    # extension is unavailable, so a missing Cython is not fatal.
    extensions = []
else:
    extensions = cythonize(
        [
            Extension(
                "toepforms._kernels._native",
                ["src/toepforms/_kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
