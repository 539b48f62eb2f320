"""Backend selection for the hot loops.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
pure Python module is used.  Setting ``GAPSTRESS_PURE_PYTHON=1`` forces the
fallback, which is how the tests compare both backends.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("GAPSTRESS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

gk_radial = _impl.gk_radial
strain_triplets = _impl.strain_triplets
