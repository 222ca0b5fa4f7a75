"""Dense gradients and per-pixel velocity between successive gaze regions.

The velocity update subtracts the gradient-projected residual from a seed
field. Two modes are offered:

- ``literal-recursion``: one update per frame, seeded with the previous
  frame's velocity (zero at the start of a chain). This is the printed form
  of the update equations taken at face value.
- ``iterative-relaxation``: the classic form, where the seed on the
  right-hand side is replaced by the 4-neighbor average of the current
  estimate and the update is repeated a fixed number of times per frame,
  still warm-started from the previous frame's velocity.

Orientation is the two-argument arctangent of (u, v) — u over v, matching
the parameter definition downstream — wrapped to [0, 2pi).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

REGION_SIZE = 56

MODE_LITERAL = "literal-recursion"
MODE_RELAX = "iterative-relaxation"

# 3x3 derivative kernels applied by true convolution to the smoothed
# previous frame.
GX = np.array([[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]])
GY = np.array([[1.0, 2.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -2.0, -1.0]])


@dataclass(frozen=True)
class FlowConfig:
    alpha: float = 1.0
    iterations: int = 8
    gaussian_sigma: float = 1.0
    mode: str = MODE_LITERAL

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.gaussian_sigma < 0:
            raise ValueError("gaussian_sigma must be >= 0")
        if self.mode not in (MODE_LITERAL, MODE_RELAX):
            raise ValueError(f"unknown flow mode: {self.mode!r}")


@dataclass
class GradientPlanes:
    ex: np.ndarray
    ey: np.ndarray
    et: np.ndarray


@dataclass
class FlowField:
    u: np.ndarray
    v: np.ndarray
    magnitude: np.ndarray
    orientation: np.ndarray


def gaussian_weights(sigma):
    """Normalized 1-D Gaussian taps with radius ceil(3*sigma)."""
    if sigma == 0:
        return np.array([1.0])
    radius = math.ceil(3 * sigma)
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(t * t) / (2 * sigma * sigma))
    return w / w.sum()


def smooth(patch, sigma):
    """Separable Gaussian smoothing with replicate borders; sigma=0 is identity."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    patch = np.ascontiguousarray(patch, dtype=np.float64)
    if sigma == 0:
        return patch.copy()
    return kernels.smooth_separable(patch, gaussian_weights(sigma))


def gradients(prev_smoothed, curr):
    """Spatial gradients of the previous (smoothed) patch; temporal difference."""
    prev_smoothed = np.ascontiguousarray(prev_smoothed, dtype=np.float64)
    curr = np.ascontiguousarray(curr, dtype=np.float64)
    if prev_smoothed.shape != curr.shape:
        raise ValueError("gradient inputs must have identical shapes")
    ex = kernels.convolve3x3(prev_smoothed, GX)
    ey = kernels.convolve3x3(prev_smoothed, GY)
    et = curr - prev_smoothed
    return GradientPlanes(ex=ex, ey=ey, et=et)


def zero_flow(shape=(REGION_SIZE, REGION_SIZE)):
    z = np.zeros(shape, dtype=np.float64)
    return FlowField(u=z.copy(), v=z.copy(), magnitude=z.copy(), orientation=z.copy())


def flow_step(grads: GradientPlanes, seed: FlowField, cfg: FlowConfig) -> FlowField:
    """Advance the velocity field by one frame."""
    ex = grads.ex
    ey = grads.ey
    et = np.ascontiguousarray(grads.et, dtype=np.float64)
    su = np.ascontiguousarray(seed.u, dtype=np.float64)
    sv = np.ascontiguousarray(seed.v, dtype=np.float64)
    if cfg.mode == MODE_LITERAL:
        u, v = kernels.flow_step_literal(ex, ey, et, su, sv, cfg.alpha)
    else:
        u, v = kernels.flow_step_relax(ex, ey, et, su, sv, cfg.alpha, cfg.iterations)
    mag, ori = kernels.magnitude_orientation(u, v)
    return FlowField(u=u, v=v, magnitude=mag, orientation=ori)
