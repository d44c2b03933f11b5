"""Build hook for the optional compiled kernels.

The package works without the extension; ``teachlab.kernels`` falls back to
the pure-Python implementation when ``_ckernels`` is missing.
"""

import os
import platform

from setuptools import setup

ext_modules = []
if os.environ.get("TEACHLAB_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        flags = ["-O3"]
        if platform.machine() in ("x86_64", "AMD64"):
            flags.append("-mpopcnt")
        ext_modules = cythonize(
            [
                Extension(
                    "teachlab.kernels._ckernels",
                    ["src/teachlab/kernels/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=flags,
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
