"""Pick the compiled kernel when it is importable, else the Python twin.

Set ``CMCEST_FORCE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("CMCEST_FORCE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
