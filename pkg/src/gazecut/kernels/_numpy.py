"""Pure-numpy implementations of the per-pixel kernels.

This is the fallback backend used when the compiled extension is not
available. The compiled module (`_ckernels`) implements the same functions
with the same accumulation order, so both backends produce bit-identical
results for the integer outputs and agree to the last few ulps on floats.
"""

import numpy as np

TWO_PI = 2 * np.pi
HALF_PI = np.pi / 2
THREE_HALF_PI = 3 * np.pi / 2
QUARTER_PI = np.pi / 4

# Non-maximum suppression neighbor offsets (dr, dc) per quantized gradient
# sector: 0 = horizontal, 1 = down-right diagonal, 2 = vertical, 3 = down-left.
_SECTOR_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1))


def _axis_pass(img, weights, axis):
    r = len(weights) // 2
    pad = [(0, 0), (r, r)] if axis == 1 else [(r, r), (0, 0)]
    padded = np.pad(img, pad, mode="edge")
    out = np.zeros(img.shape, dtype=np.float64)
    h, w = img.shape
    for t in range(len(weights)):
        if axis == 1:
            out += weights[t] * padded[:, t : t + w]
        else:
            out += weights[t] * padded[t : t + h, :]
    return out


def smooth_separable(img, weights):
    """Separable convolution with a symmetric 1-D kernel, replicate border."""
    out = _axis_pass(img, weights, axis=1)
    return _axis_pass(out, weights, axis=0)


def convolve3x3(img, kernel):
    """True 2-D convolution (kernel flipped) with replicate border."""
    h, w = img.shape
    padded = np.pad(img, 1, mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(3):
        for j in range(3):
            out += kernel[i, j] * padded[2 - i : 2 - i + h, 2 - j : 2 - j + w]
    return out


def flow_step_literal(ex, ey, et, seed_u, seed_v, alpha):
    """Single velocity update seeded with the previous frame's flow."""
    denom = alpha * alpha + ex * ex + ey * ey
    t = (ex * seed_u + ey * seed_v + et) / denom
    return seed_u - ex * t, seed_v - ey * t


def _four_avg(a):
    h, w = a.shape
    p = np.pad(a, 1, mode="edge")
    return ((p[0:h, 1 : w + 1] + p[2 : h + 2, 1 : w + 1])
            + (p[1 : h + 1, 0:w] + p[1 : h + 1, 2 : w + 2])) * 0.25


def flow_step_relax(ex, ey, et, seed_u, seed_v, alpha, iterations):
    """Jacobi relaxation: neighbor averages on the right-hand side."""
    denom = alpha * alpha + ex * ex + ey * ey
    u = seed_u.copy()
    v = seed_v.copy()
    for _ in range(iterations):
        ub = _four_avg(u)
        vb = _four_avg(v)
        t = (ex * ub + ey * vb + et) / denom
        u = ub - ex * t
        v = vb - ey * t
    return u, v


def magnitude_orientation(u, v):
    """Magnitude sqrt(u^2+v^2); orientation atan2(u, v) wrapped to [0, 2pi).

    Orientation is reported as 0 where the magnitude is 0 (undefined there;
    callers must exclude zero-flow pixels from orientation statistics).
    """
    mag = np.sqrt(u * u + v * v)
    ori = np.arctan2(u, v)
    ori = np.where(ori < 0, ori + TWO_PI, ori)
    ori = np.where(mag == 0, 0.0, ori)
    return mag, ori


def bin_plane(mag, ori):
    """Quadrant bin index 0..3 per pixel, -1 where the flow magnitude is 0."""
    b = ((ori >= HALF_PI).astype(np.int8)
         + (ori >= np.pi).astype(np.int8)
         + (ori >= THREE_HALF_PI).astype(np.int8))
    return np.where(mag > 0, b, np.int8(-1)).astype(np.int8)


def weighted_bins(bins, mag):
    """Magnitude-weighted mass per orientation bin (4 values)."""
    sel = bins >= 0
    return np.bincount(bins[sel].astype(np.int64), weights=mag[sel], minlength=4)[:4]


def foreground_count(bins, b0, b1):
    """Pixels with nonzero flow whose bin is neither background bin."""
    fg = (bins >= 0) & (bins != b0) & (bins != b1)
    return int(fg.sum())


def nms(mag, gx, gy):
    """Non-maximum suppression along the quantized gradient direction.

    Ties are broken asymmetrically (>= toward the negative neighbor, > toward
    the positive one) so a two-pixel-wide ridge keeps exactly one pixel.
    """
    h, w = mag.shape
    p = np.pad(mag, 1, mode="edge")

    def shifted(dr, dc):
        return p[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]

    ang = np.arctan2(gy, gx)
    ang = np.where(ang < 0, ang + np.pi, ang)
    sector = np.floor(ang / QUARTER_PI + 0.5).astype(np.int64) % 4

    keep = np.zeros(mag.shape, dtype=bool)
    for s, (dr, dc) in enumerate(_SECTOR_OFFSETS):
        in_sector = sector == s
        keep |= in_sector & (mag >= shifted(-dr, -dc)) & (mag > shifted(dr, dc))
    return np.where(keep, mag, 0.0)


def _dilate8(mask):
    h, w = mask.shape
    p = np.pad(mask, 1, mode="constant")
    out = mask.copy()
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            out |= p[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
    return out


def hysteresis(sup, low, high):
    """Double-threshold hysteresis with 8-connectivity.

    Pixels >= high seed the edge set; pixels >= low join when 8-connected to
    a seed through other candidates.
    """
    weak = sup >= low
    edges = (sup >= high) & weak
    while True:
        grown = _dilate8(edges) & weak
        if grown.sum() == edges.sum():
            return grown
        edges = grown
