"""Kernel backend selection.

The compiled extension is preferred when it imports; otherwise the pure
Python twin takes over. Set HOPFKNOT_BACKEND=python to force the fallback
(useful for the parity tests and the backend benchmark).
"""

import os

if os.environ.get("HOPFKNOT_BACKEND", "").lower() in ("py", "python"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
        BACKEND = "c"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"
