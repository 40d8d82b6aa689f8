from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "saea_lab._sort_ext",
        ["src/saea_lab/_sort_ext.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
