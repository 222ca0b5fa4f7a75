"""Per-video orchestration: frames + gaze track -> features -> segments.

The flow recursion is a sequential chain over frames; a frame has motion
parameters only when both it and its predecessor have a valid gaze region.
Both patches entering the gradient computation are Gaussian-smoothed with
the same sigma, so a fully static sequence yields exactly zero flow.
"""

from pathlib import Path

import numpy as np

from .config import RunConfig
from .cut_detector import FrameFeatures, assemble_segments, decide_cut, median_smooth
from .entropy_filters import SkinModel, canny, edge_ratio, hand_score
from .frame_io import dense_gaze_track
from .gaze_region import extract_region
from .motion_params import build_histogram, compute_fpr, compute_sdm, label_pixels
from .optical_flow import flow_step, gradients, smooth, zero_flow


def _dump_flow(dump_dir, frame_index, flow):
    base = Path(dump_dir)
    base.mkdir(parents=True, exist_ok=True)
    for name, plane in (("u", flow.u), ("v", flow.v),
                        ("mag", flow.magnitude), ("ori", flow.orientation)):
        np.savetxt(base / f"frame_{frame_index:05d}_{name}.csv", plane, delimiter=",")


def compute_frame_features(frames, gaze_samples, skin_model: SkinModel,
                           cfg: RunConfig, flow_dump_dir=None):
    """Compute the raw and median-smoothed parameter series for one video.

    Returns (features, histograms); histograms holds the raw orientation-bin
    masses per frame (None where flow is unavailable) for debug traces.
    """
    dense = dense_gaze_track(gaze_samples, len(frames))
    flow_cfg = cfg.flow_config()

    features = []
    histograms = []
    prev_smoothed = None
    prev_flow = None
    for k, frame in enumerate(frames):
        feat = FrameFeatures(frame_index=k)
        region = extract_region(frame, dense[k])
        if region is None:
            prev_smoothed = None
            prev_flow = None
            features.append(feat)
            histograms.append(None)
            continue

        edges = canny(region.y_patch, low=cfg.canny_low, high=cfg.canny_high,
                      sigma=cfg.canny_sigma)
        feat.phi = edge_ratio(edges)
        feat.upsilon = hand_score(region, skin_model)

        smoothed = smooth(region.y_patch.astype(np.float64), flow_cfg.gaussian_sigma)
        if prev_smoothed is not None:
            grads = gradients(prev_smoothed, smoothed)
            seed = prev_flow if prev_flow is not None else zero_flow()
            flow = flow_step(grads, seed, flow_cfg)
            hist = build_histogram(flow)
            feat.fpr_raw = compute_fpr(label_pixels(flow, hist))
            feat.sdm_raw = compute_sdm(hist)
            histograms.append(hist.bins)
            if flow_dump_dir is not None:
                _dump_flow(flow_dump_dir, k, flow)
            prev_flow = flow
        else:
            histograms.append(None)
            prev_flow = None
        prev_smoothed = smoothed
        features.append(feat)

    fpr_series = [f.fpr_raw for f in features]
    sdm_series = [f.sdm_raw for f in features]
    for k, feat in enumerate(features):
        feat.fpr_med = median_smooth(fpr_series, k)
        feat.sdm_med = median_smooth(sdm_series, k)
    return features, histograms


def apply_cuts(features, thresholds):
    """Fill in the per-frame cut decision for a finished feature series."""
    for feat in features:
        feat.cut_flag = decide_cut(feat, thresholds)
    return features


def run_video(frames, gaze_samples, skin_model: SkinModel, cfg: RunConfig):
    """Full single-video run: features with cut flags plus action segments."""
    features, _ = compute_frame_features(frames, gaze_samples, skin_model, cfg)
    apply_cuts(features, cfg.thresholds())
    segments = assemble_segments([f.cut_flag for f in features], min_run=cfg.min_run)
    return features, segments
