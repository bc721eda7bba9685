import os

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kernels fall back at import
    ext_modules = []
else:
    extensions = [
        Extension(
            "walkbench.kernels._walk_cy",
            ["src/walkbench/kernels/_walk_cy.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            optional=True,
        )
    ]
    ext_modules = [] if os.environ.get("WALKBENCH_NO_EXT") else cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
