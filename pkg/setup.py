from setuptools import Extension, setup

import numpy as np

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "bitwave.nn._convkernels",
                ["src/bitwave/nn/_convkernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

# The package works without the extension: bitwave.nn.backend falls back to
# the numpy kernels when the compiled module is absent.
setup(ext_modules=ext_modules)
