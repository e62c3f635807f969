"""Build script for the optional Cython statevector kernels.

The package works without the extension: ftqc.kernels falls back to a pure
numpy implementation when the compiled module is missing or when
FTQC_PURE_PYTHON=1 is set.  Set FTQC_SKIP_CYTHON=1 to install without
attempting to compile.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FTQC_SKIP_CYTHON"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/ftqc/_kernels.pyx"],
            compiler_directives={"language_level": "3"},
        )
        for ext in ext_modules:
            ext.include_dirs.append(np.get_include())
    except Exception as exc:  # pragma: no cover - build-environment dependent
        print(f"ftqc: skipping Cython kernels ({exc}); pure-python fallback will be used")

setup(ext_modules=ext_modules)
