"""The two region-quality filters: edge ratio and skin-based hand score.

The edge ratio rejects flat-textured fixations (walls, desk surfaces): it is
the fraction of region pixels marked as edges by a staged Canny detector.

The hand score gates cuts on hand presence. A two-class Bayes model over a
2-D chroma (U, V) histogram gives a per-pixel skin posterior; the score is
the mean posterior over the region. Likelihoods are Laplace-smoothed at
query time so no bin has zero probability.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .frame_io import InputError
from .gaze_region import GazeRegion
from .optical_flow import GX, GY, gaussian_weights

DEFAULT_CANNY_LOW = 30.0
DEFAULT_CANNY_HIGH = 90.0
DEFAULT_CANNY_SIGMA = 1.4
DEFAULT_BINS_PER_AXIS = 32
DEFAULT_PRIOR_SKIN = 0.5


@dataclass
class EdgeMap:
    bits: np.ndarray
    nzp: int


def canny(region_y, low=DEFAULT_CANNY_LOW, high=DEFAULT_CANNY_HIGH,
          sigma=DEFAULT_CANNY_SIGMA):
    """Staged Canny: smooth, Sobel, non-maximum suppression, hysteresis."""
    if not (0 <= low <= high):
        raise ValueError("thresholds must satisfy 0 <= low <= high")
    y = np.ascontiguousarray(region_y, dtype=np.float64)
    if sigma > 0:
        y = kernels.smooth_separable(y, gaussian_weights(sigma))
    gx = kernels.convolve3x3(y, GX)
    gy = kernels.convolve3x3(y, GY)
    mag = np.sqrt(gx * gx + gy * gy)
    sup = kernels.nms(mag, gx, gy)
    bits = kernels.hysteresis(sup, low, high)
    return EdgeMap(bits=bits, nzp=int(bits.sum()))


def edge_ratio(edges: EdgeMap) -> float:
    """Fraction of region pixels that are edge pixels."""
    return edges.nzp / edges.bits.size


@dataclass
class SkinModel:
    bins_per_axis: int
    skin_hist: np.ndarray
    nonskin_hist: np.ndarray
    prior_skin: float


def _bin_indices(values, bins_per_axis):
    # floor(value / (256 / bins)) without float division
    return np.asarray(values, dtype=np.int64) * bins_per_axis // 256


def train_skin_model(skin_pixels, nonskin_pixels,
                     bins_per_axis=DEFAULT_BINS_PER_AXIS,
                     prior_skin=DEFAULT_PRIOR_SKIN) -> SkinModel:
    """Accumulate labeled (u, v) samples into the two chroma histograms."""
    if bins_per_axis < 2:
        raise ValueError("bins_per_axis must be >= 2")
    if not 0 < prior_skin < 1:
        raise ValueError("prior_skin must be strictly between 0 and 1")
    if len(skin_pixels) == 0:
        raise InputError("skin sample list is empty")
    if len(nonskin_pixels) == 0:
        raise InputError("nonskin sample list is empty")

    def accumulate(pixels):
        arr = np.asarray(pixels, dtype=np.int64).reshape(-1, 2)
        if arr.min() < 0 or arr.max() > 255:
            raise InputError("chroma samples must lie in [0,255]")
        bu = _bin_indices(arr[:, 0], bins_per_axis)
        bv = _bin_indices(arr[:, 1], bins_per_axis)
        hist = np.zeros((bins_per_axis, bins_per_axis), dtype=np.int64)
        np.add.at(hist, (bu, bv), 1)
        return hist

    return SkinModel(
        bins_per_axis=bins_per_axis,
        skin_hist=accumulate(skin_pixels),
        nonskin_hist=accumulate(nonskin_pixels),
        prior_skin=float(prior_skin),
    )


def _likelihood_tables(model: SkinModel, laplace):
    cells = model.bins_per_axis * model.bins_per_axis
    ls = (model.skin_hist + laplace) / (model.skin_hist.sum() + laplace * cells)
    ln = (model.nonskin_hist + laplace) / (model.nonskin_hist.sum() + laplace * cells)
    return ls, ln


def posterior_table(model: SkinModel, laplace=1.0):
    """Per-bin skin posterior p(skin | u, v) over the whole chroma grid."""
    ls, ln = _likelihood_tables(model, laplace)
    num = ls * model.prior_skin
    denom = num + ln * (1.0 - model.prior_skin)
    out = np.full(num.shape, model.prior_skin)
    nz = denom > 0
    out[nz] = num[nz] / denom[nz]
    return out


def skin_posterior(u, v, model: SkinModel, laplace=1.0) -> float:
    """Skin posterior for one chroma value."""
    if not (0 <= u <= 255 and 0 <= v <= 255):
        raise ValueError("chroma values must lie in [0,255]")
    bu = int(u) * model.bins_per_axis // 256
    bv = int(v) * model.bins_per_axis // 256
    return float(posterior_table(model, laplace)[bu, bv])


def hand_score(region: GazeRegion, model: SkinModel, laplace=1.0) -> float:
    """Mean skin posterior over every pixel of the gaze region."""
    table = posterior_table(model, laplace)
    bu = _bin_indices(region.u_patch, model.bins_per_axis)
    bv = _bin_indices(region.v_patch, model.bins_per_axis)
    return float(table[bu, bv].mean())


def save_skin_model(path, model: SkinModel):
    payload = {
        "bins_per_axis": model.bins_per_axis,
        "prior_skin": model.prior_skin,
        "skin_hist": model.skin_hist.reshape(-1).tolist(),
        "nonskin_hist": model.nonskin_hist.reshape(-1).tolist(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True))


def load_skin_model(path) -> SkinModel:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"skin model not found: {path}")
    try:
        payload = json.loads(path.read_text())
        bins = int(payload["bins_per_axis"])
        prior = float(payload["prior_skin"])
        skin = np.asarray(payload["skin_hist"], dtype=np.int64).reshape(bins, bins)
        nonskin = np.asarray(payload["nonskin_hist"], dtype=np.int64).reshape(bins, bins)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: malformed skin model ({exc})") from exc
    return SkinModel(bins_per_axis=bins, skin_hist=skin,
                     nonskin_hist=nonskin, prior_skin=prior)
