"""Pixel-kernel backend selection.

The compiled extension is preferred when present; the pure-numpy fallback is
used otherwise, or when GAZECUT_PURE_PYTHON is set in the environment. Both
backends implement the same contract (see `_numpy` for reference semantics).
"""

import os

if os.environ.get("GAZECUT_PURE_PYTHON"):
    from . import _numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _numpy as _impl

        BACKEND = "numpy"

smooth_separable = _impl.smooth_separable
convolve3x3 = _impl.convolve3x3
flow_step_literal = _impl.flow_step_literal
flow_step_relax = _impl.flow_step_relax
magnitude_orientation = _impl.magnitude_orientation
bin_plane = _impl.bin_plane
weighted_bins = _impl.weighted_bins
foreground_count = _impl.foreground_count
nms = _impl.nms
hysteresis = _impl.hysteresis

__all__ = [
    "BACKEND",
    "bin_plane",
    "convolve3x3",
    "flow_step_literal",
    "flow_step_relax",
    "foreground_count",
    "hysteresis",
    "magnitude_orientation",
    "nms",
    "smooth_separable",
    "weighted_bins",
]
