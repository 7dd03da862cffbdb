"""Build the optional compiled machine.

The reduction machine in ``minicurry/eval/_machine.py`` is plain Python.
When Cython is importable the same source is also compiled into the
extension ``minicurry.eval._cmachine``; the package falls back to the pure
module when the extension is missing.  Set ``MINICURRY_NO_EXT=1`` to skip
the build.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("MINICURRY_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension("minicurry.eval._cmachine", [os.path.join("src", "minicurry", "eval", "_machine.py")])
        ext_modules = cythonize(
            [ext],
            compiler_directives={"language_level": "3"},
            build_dir="build/cython",
            quiet=True,
        )

setup(ext_modules=ext_modules)
