"""Stepper kernel selection.

Imports the compiled extension when available, otherwise the pure-numpy
fallback with the identical API. Set VISCOWAVE_PURE_PYTHON=1 to force the
fallback (used by the benchmark and the test matrix).
"""

import os

from . import _fallback

if os.environ.get("VISCOWAVE_PURE_PYTHON") == "1":
    _impl = _fallback
    HAVE_COMPILED = False
else:
    try:
        from . import _core as _impl

        HAVE_COMPILED = True
    except ImportError:
        _impl = _fallback
        HAVE_COMPILED = False

volterra_free = _impl.volterra_free
forced_modes = _impl.forced_modes

__all__ = ["volterra_free", "forced_modes", "HAVE_COMPILED"]
