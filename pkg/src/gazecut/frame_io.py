"""Frame sequences, gaze tracks, ground truth and trace files on disk.

A video input directory consists of a JSON manifest naming binary PPM frames
plus CSV sidecar files. All CSV readers skip blank lines and lines starting
with '#', so provenance headers written by the CLI round-trip cleanly.
"""

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class InputError(Exception):
    """Malformed or inconsistent input data."""


@dataclass
class Frame:
    """One video frame as full-resolution Y, U, V planes (uint8, h x w)."""

    index: int
    width: int
    height: int
    y_plane: np.ndarray
    u_plane: np.ndarray
    v_plane: np.ndarray


@dataclass(frozen=True)
class GazeSample:
    frame_index: int
    x: int
    y: int
    valid: bool


@dataclass(frozen=True)
class GroundTruthSegment:
    label: str
    start: int
    end: int


# BT.601 full-range RGB -> YUV, chroma offset +128. Rounding is half-up so the
# scalar and vectorized paths agree exactly.

def convert_rgb_to_yuv(r, g, b):
    """Convert one RGB triple (each clamped to [0,255]) to integer (y, u, v)."""
    r = min(max(float(r), 0.0), 255.0)
    g = min(max(float(g), 0.0), 255.0)
    b = min(max(float(b), 0.0), 255.0)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    u = -0.169 * r - 0.331 * g + 0.5 * b + 128.0
    v = 0.5 * r - 0.419 * g - 0.081 * b + 128.0
    clamp = lambda x: int(min(max(math.floor(x + 0.5), 0), 255))
    return clamp(y), clamp(u), clamp(v)


def rgb_planes_to_yuv(rgb):
    """Vectorized conversion of an (h, w, 3) uint8 image to Y, U, V planes."""
    r = rgb[:, :, 0].astype(np.float64)
    g = rgb[:, :, 1].astype(np.float64)
    b = rgb[:, :, 2].astype(np.float64)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    u = -0.169 * r - 0.331 * g + 0.5 * b + 128.0
    v = 0.5 * r - 0.419 * g - 0.081 * b + 128.0
    planes = []
    for p in (y, u, v):
        planes.append(np.clip(np.floor(p + 0.5), 0, 255).astype(np.uint8))
    return tuple(planes)


def read_ppm(path):
    """Read a binary (P6) 8-bit PPM into an (h, w, 3) uint8 array."""
    data = Path(path).read_bytes()
    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise InputError(f"{path}: truncated PPM header")
        return data[start:pos]

    magic = next_token()
    if magic != b"P6":
        raise InputError(f"{path}: not a binary PPM (magic {magic!r})")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError as exc:
        raise InputError(f"{path}: malformed PPM header") from exc
    if maxval != 255:
        raise InputError(f"{path}: unsupported maxval {maxval} (expected 255)")
    pos += 1  # single whitespace byte after maxval
    expected = width * height * 3
    raster = data[pos : pos + expected]
    if len(raster) != expected:
        raise InputError(f"{path}: raster truncated ({len(raster)} of {expected} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)


def write_ppm(path, rgb):
    """Write an (h, w, 3) uint8 array as a binary (P6) PPM."""
    h, w, _ = rgb.shape
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def load_manifest(manifest_path):
    path = Path(manifest_path)
    if not path.is_file():
        raise InputError(f"manifest not found: {path}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    for key in ("frames", "width", "height"):
        if key not in manifest:
            raise InputError(f"{path}: manifest missing '{key}'")
    return manifest


def load_sequence(manifest_path):
    """Load the ordered frame sequence described by a JSON manifest."""
    path = Path(manifest_path)
    manifest = load_manifest(path)
    width = int(manifest["width"])
    height = int(manifest["height"])
    if width < 56 or height < 56:
        raise InputError(f"{path}: frames must be at least 56x56, got {width}x{height}")
    base = path.parent
    frames = []
    for index, rel in enumerate(manifest["frames"]):
        frame_path = base / rel
        if not frame_path.is_file():
            raise InputError(f"frame {index}: file not found: {frame_path}")
        try:
            rgb = read_ppm(frame_path)
        except InputError as exc:
            raise InputError(f"frame {index}: {exc}") from exc
        h, w, _ = rgb.shape
        if (w, h) != (width, height):
            raise InputError(
                f"frame {index}: dimensions {w}x{h} do not match manifest {width}x{height}"
            )
        y, u, v = rgb_planes_to_yuv(rgb)
        frames.append(Frame(index=index, width=width, height=height,
                            y_plane=y, u_plane=u, v_plane=v))
    return frames


def _data_rows(path, expected_header):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"file not found: {path}")
    with open(path, newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if [c.strip() for c in row] == expected_header:
                continue
            yield lineno, [c.strip() for c in row]


def load_gaze_track(path):
    """Load `frame_index,x,y,valid` rows; frames absent here count as saccades."""
    samples = {}
    for lineno, row in _data_rows(path, ["frame_index", "x", "y", "valid"]):
        if len(row) != 4:
            raise InputError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
        try:
            frame_index, x, y, valid = (int(c) for c in row)
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: non-numeric field") from exc
        if valid not in (0, 1):
            raise InputError(f"{path}:{lineno}: valid flag must be 0 or 1")
        if frame_index in samples:
            raise InputError(f"{path}:{lineno}: duplicate frame_index {frame_index}")
        samples[frame_index] = GazeSample(frame_index, x, y, bool(valid))
    return [samples[k] for k in sorted(samples)]


def dense_gaze_track(samples, num_frames):
    """Expand a sparse gaze track to one sample per frame (absent = invalid)."""
    by_index = {s.frame_index: s for s in samples}
    return [by_index.get(k, GazeSample(k, 0, 0, False)) for k in range(num_frames)]


def load_ground_truth(path):
    """Load `label,start,end` rows; intervals must be mutually exclusive."""
    segments = []
    for lineno, row in _data_rows(path, ["label", "start", "end"]):
        if len(row) != 3:
            raise InputError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
        label = row[0]
        try:
            start, end = int(row[1]), int(row[2])
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: non-numeric frame index") from exc
        if start > end:
            raise InputError(f"{path}:{lineno}: start {start} > end {end}")
        segments.append(GroundTruthSegment(label, start, end))
    segments.sort(key=lambda s: (s.start, s.end))
    for a, b in zip(segments, segments[1:]):
        if b.start <= a.end:
            raise InputError(
                f"{path}: overlapping segments [{a.start},{a.end}] and [{b.start},{b.end}]"
            )
    return segments


def load_segments(path):
    """Load `start,end` rows written by write_segments."""
    out = []
    for lineno, row in _data_rows(path, ["start", "end"]):
        if len(row) != 2:
            raise InputError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            start, end = int(row[0]), int(row[1])
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: non-numeric frame index") from exc
        if start > end:
            raise InputError(f"{path}:{lineno}: start {start} > end {end}")
        out.append((start, end))
    return out


def _open_with_provenance(path, config_hash):
    f = open(path, "w", newline="")
    if config_hash is not None:
        f.write(f"# config={config_hash}\n")
    return f


def write_gaze_track(path, samples):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["frame_index", "x", "y", "valid"])
        for s in samples:
            w.writerow([s.frame_index, s.x, s.y, int(s.valid)])


def write_ground_truth(path, segments):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["label", "start", "end"])
        for s in segments:
            w.writerow([s.label, s.start, s.end])


def write_segments(path, segments, config_hash=None):
    with _open_with_provenance(path, config_hash) as f:
        w = csv.writer(f)
        w.writerow(["start", "end"])
        for s in segments:
            w.writerow([s.start, s.end])


def _fmt(value):
    return "NA" if value is None else repr(float(value))


def write_feature_trace(path, features, config_hash=None, histograms=None):
    """Write the per-frame feature trace; optional raw histogram columns."""
    with _open_with_provenance(path, config_hash) as f:
        w = csv.writer(f)
        header = ["frame", "fpr_raw", "sdm_raw", "phi", "upsilon",
                  "fpr_med", "sdm_med", "cut"]
        if histograms is not None:
            header += ["bin_1", "bin_2", "bin_3", "bin_4"]
        w.writerow(header)
        for i, feat in enumerate(features):
            row = [feat.frame_index, _fmt(feat.fpr_raw), _fmt(feat.sdm_raw),
                   _fmt(feat.phi), _fmt(feat.upsilon), _fmt(feat.fpr_med),
                   _fmt(feat.sdm_med), int(feat.cut_flag)]
            if histograms is not None:
                hist = histograms[i]
                row += ["NA"] * 4 if hist is None else [repr(float(b)) for b in hist]
            w.writerow(row)


def write_pixel_samples(path, pixels):
    """Write (u, v) chroma samples as `u,v` rows (skin-model training input)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["u", "v"])
        for u, v in pixels:
            w.writerow([int(u), int(v)])


def load_pixel_samples(path):
    out = []
    for lineno, row in _data_rows(path, ["u", "v"]):
        if len(row) != 2:
            raise InputError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            u, v = int(row[0]), int(row[1])
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: non-numeric chroma value") from exc
        if not (0 <= u <= 255 and 0 <= v <= 255):
            raise InputError(f"{path}:{lineno}: chroma out of range [0,255]")
        out.append((u, v))
    return out
