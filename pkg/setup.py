from setuptools import Extension, setup

# The compiled round-network kernel is optional: if Cython (or a C compiler)
# is unavailable the package falls back to the pure-Python implementation.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "geofpe._speedups",
                ["src/geofpe/_speedups.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
