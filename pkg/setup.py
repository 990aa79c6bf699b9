"""Optional compiled interpreter core.

`python setup.py build_ext --inplace` copies the pure-Python interpreter
kernel (shipgame/runtime/interp.py) to _interp_speed.py and compiles that
copy with Cython; shipgame.runtime prefers the compiled module at import
and falls back to the pure one. Installation works fine without Cython or
a C compiler - the extension is best-effort.
"""

import shutil
from pathlib import Path

from setuptools import setup

HERE = Path(__file__).resolve().parent
RUNTIME = HERE / "src" / "shipgame" / "runtime"
KERNEL = RUNTIME / "interp.py"
SPEED_COPY = RUNTIME / "_interp_speed.py"


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    shutil.copyfile(KERNEL, SPEED_COPY)
    return cythonize(
        [str(SPEED_COPY)],
        compiler_directives={
            "language_level": "3",
            "annotation_typing": False,
            "binding": True,
        },
        quiet=True,
    )


setup(ext_modules=_extensions())
