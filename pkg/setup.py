from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "uted._core",
        ["src/uted/_core.pyx"],
        extra_compile_args=["-O3"],
    )
]

if cythonize is not None:
    ext_modules = cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
else:
    # source dist without Cython: the package falls back to the pure kernels
    ext_modules = []

setup(ext_modules=ext_modules)
