"""Orientation histogram, background declaration and the two motion parameters.

Each pixel with nonzero flow contributes its magnitude to one of four
quadrant orientation bins. The two heaviest bins are declared the background
motions; pixels are foreground when their flow is nonzero and falls outside
both background bins. From this come the foreground pixel ratio (share of
foreground pixels in the region) and the standard deviation of motions (the
population standard deviation of the four bin masses after normalizing them
to sum to one).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .optical_flow import FlowField

NUM_BINS = 4

# Highest normalized-bin spread: all mass in one bin, sqrt(0.1875).
SDM_MAX = float(np.sqrt((0.75**2 + 3 * 0.25**2) / 4))


@dataclass
class MotionHistogram:
    bins: np.ndarray
    total_weight: float
    background_bins: tuple

    def normalized(self):
        if self.total_weight == 0:
            return np.zeros(NUM_BINS)
        return self.bins / self.total_weight


@dataclass(frozen=True)
class PixelLabeling:
    foreground_count: int
    background_count: int


def build_histogram(flow: FlowField) -> MotionHistogram:
    """Magnitude-weighted orientation histogram with the top-2 bins marked."""
    bp = kernels.bin_plane(flow.magnitude, flow.orientation)
    bins = kernels.weighted_bins(bp, flow.magnitude)
    order = sorted(range(NUM_BINS), key=lambda i: (-bins[i], i))
    return MotionHistogram(
        bins=bins,
        total_weight=float(bins.sum()),
        background_bins=(order[0], order[1]),
    )


def label_pixels(flow: FlowField, hist: MotionHistogram) -> PixelLabeling:
    """Split region pixels into foreground and background counts.

    Zero-magnitude pixels count as background: features that do not move
    belong to the scene, not to the acting hand.
    """
    bp = kernels.bin_plane(flow.magnitude, flow.orientation)
    b0, b1 = hist.background_bins
    fg = kernels.foreground_count(bp, b0, b1)
    total = flow.magnitude.size
    return PixelLabeling(foreground_count=fg, background_count=total - fg)


def compute_fpr(labeling: PixelLabeling) -> float:
    """Foreground pixel ratio over the region."""
    total = labeling.foreground_count + labeling.background_count
    return labeling.foreground_count / total


def compute_sdm(hist: MotionHistogram) -> float:
    """Population standard deviation of the normalized bin masses.

    An all-zero histogram (no moving pixels) is defined to have sdm 0.
    """
    if hist.total_weight == 0:
        return 0.0
    theta = hist.bins / hist.total_weight
    mean = theta.sum() / NUM_BINS
    return float(np.sqrt(np.sum((theta - mean) ** 2) / NUM_BINS))
