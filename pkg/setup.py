from setuptools import Extension, setup
from Cython.Build import cythonize

# No -ffast-math / -march: the compiled kernels must produce the same IEEE
# doubles as the pure-Python fallback.
extensions = [
    Extension(
        "majorant_gap._kernels._core",
        ["src/majorant_gap/_kernels/_core.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
    )
)
