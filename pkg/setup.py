"""Build hook for the optional compiled tridiagonal kernels.

If Cython or a C compiler is unavailable the extension is skipped and the
package falls back to ``monopole_vortex._tridiag_py`` at import time.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "monopole_vortex._tridiag_c",
                ["src/monopole_vortex/_tridiag_c.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
