"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``FIMOD_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
by the tests that compare both implementations).
"""

import os

from . import _kernels_py

BACKEND = "python"
rref_modp = _kernels_py.rref_modp
echelon_modp = _kernels_py.echelon_modp

if os.environ.get("FIMOD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "compiled"
        rref_modp = _kernels.rref_modp
        echelon_modp = _kernels.echelon_modp


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
