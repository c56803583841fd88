"""Kernel backend selection.

The Cython extension is used when it imports; set ``OUTLIER_RELATIONS_PURE=1``
to force the pure-Python fallback. ``BACKEND`` names the active one.
"""

import os

from . import _fallback

try:
    if os.environ.get("OUTLIER_RELATIONS_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

rolling_zscore = _impl.rolling_zscore
decay_recurrence = _impl.decay_recurrence
dominant = _impl.dominant
wls_moments = _impl.wls_moments
resample_quantiles = _impl.resample_quantiles


def backends():
    """Return ``{name: module}`` for every importable backend."""
    found = {"python": _fallback}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
