"""Backend selection for the hot kernels.

The compiled extension is preferred when it imported cleanly; setting
``NEELWALL_KERNELS=numpy`` (or ``cython``) in the environment forces a
backend, which the benchmark script uses to compare the two.
"""

from __future__ import annotations

import os

from . import _kernels_np

_forced = os.environ.get("NEELWALL_KERNELS", "").strip().lower()

if _forced == "numpy":
    _impl = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _kernels_np
        BACKEND = "numpy"

pair_lag_sum = _impl.pair_lag_sum
poisson_layer = _impl.poisson_layer
