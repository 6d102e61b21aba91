from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # no compiler toolchain: pure-Python fallback only
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "msdp._kernels",
                ["src/msdp/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
