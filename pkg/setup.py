"""Build script for the optional compiled kernel.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed build degrades to a slower install instead of
a broken one.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fractalmarch.kernels._core",
                ["src/fractalmarch/kernels/_core.pyx"],
                # Bit-identical output with the pure-Python path requires no
                # fused multiply-add and no sin+cos fusion into sincos (glibc
                # sincos differs from sin/cos by 1 ulp for some arguments).
                extra_compile_args=[
                    "-O3",
                    "-ffp-contract=off",
                    "-fno-builtin-sin",
                    "-fno-builtin-cos",
                ],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
