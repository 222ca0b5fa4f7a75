"""Deterministic synthetic egocentric scenarios with known action intervals.

The scene model follows the observation the segmenter relies on: under a
fixation the background barely moves (small camera jitter), while during an
action a textured skin-colored blob moves quickly through the fixated area.

Layout per scenario:

- Background: a fixed cell-noise texture canvas in a gray-green palette,
  cropped each frame at an offset that traces a slow circle whose per-frame
  speed equals ``camera_jitter``.
- Actions: during each action interval a textured disk in ``skin_color``
  orbits an anchor point at ``foreground_speed``, so its motion direction
  keeps rotating the way a manipulating hand does.
- Gaze: re-fixates on the blob center every few frames during actions
  (saccade-and-fixate, so the blob moves relative to the held fixation), and
  rests on background points otherwise. Every 10th non-action frame is an
  unregistered saccade (valid=0).
- Chroma separation: the blob and background palettes occupy disjoint (U, V)
  histogram bins, so a model trained on the emitted samples cleanly scores
  blob pixels as skin.

All randomness comes from a 64-bit xorshift-family generator seeded from
``seed``: a scalar xorshift64* stream for scene decisions (drawn in a fixed
order) and the stateless splitmix64 finalizer for texture hashing, so frames
are reproducible bit-for-bit across runs and platforms.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .entropy_filters import save_skin_model, train_skin_model
from .frame_io import (
    Frame,
    GazeSample,
    GroundTruthSegment,
    rgb_planes_to_yuv,
    write_gaze_track,
    write_ground_truth,
    write_pixel_samples,
    write_ppm,
)

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

BLOB_RADIUS = 20
ORBIT_RADIUS = 7.0
FIXATION_REFRESH = 8  # frames between gaze re-fixations during an action
REST_REFRESH = 15
JITTER_PERIOD = 97
SACCADE_EVERY = 10
SAMPLES_PER_CLASS = 2000
_ANCHOR_MARGIN = 70
_GRAY_LO, _GRAY_SPAN = 70.0, 110.0


def _mix64(x):
    """SplitMix64 finalizer over a 64-bit integer."""
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


class Xorshift64Star:
    """Scalar xorshift64* stream used for all scene-level draws."""

    def __init__(self, seed):
        self._state = _mix64(seed ^ _GOLDEN) or 0x1

    def next_u64(self):
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & _M64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _M64

    def uniform(self, lo=0.0, hi=1.0):
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0**-53)

    def randint(self, lo, hi):
        """Uniform integer in [lo, hi] inclusive."""
        return lo + self.next_u64() % (hi - lo + 1)


def _mix64_vec(x):
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def _hash_grid(salt, rows, cols):
    """Stateless per-cell values in [0, 1) keyed on (salt, row, col)."""
    r = np.asarray(rows, dtype=np.int64).astype(np.uint64)[:, None]
    c = np.asarray(cols, dtype=np.int64).astype(np.uint64)[None, :]
    h = _mix64_vec(np.uint64(salt) ^ (r * np.uint64(_GOLDEN)))
    h = _mix64_vec(h ^ (c * np.uint64(0xC2B2AE3D27D4EB4F)))
    return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    num_frames: int = 300
    frame_size: tuple = (320, 240)
    action_intervals: tuple = ()
    background_texture_scale: float = 4.0
    foreground_speed: float = 3.0
    skin_color: tuple = (205, 140, 110)
    camera_jitter: float = 1.0

    def __post_init__(self):
        if self.num_frames < 1:
            raise ValueError("num_frames must be positive")
        w, h = self.frame_size
        if w < 2 * _ANCHOR_MARGIN or h < 2 * _ANCHOR_MARGIN:
            raise ValueError(f"frame_size must be at least {2 * _ANCHOR_MARGIN} per axis")
        if self.foreground_speed <= 0:
            raise ValueError("foreground_speed must be positive")
        if self.camera_jitter < 0:
            raise ValueError("camera_jitter must be >= 0")
        if self.background_texture_scale < 1:
            raise ValueError("background_texture_scale must be >= 1")
        intervals = sorted(self.action_intervals)
        for start, end in intervals:
            if not (0 <= start <= end < self.num_frames):
                raise ValueError(f"interval ({start},{end}) outside [0,{self.num_frames})")
        for (_, e0), (s1, _) in zip(intervals, intervals[1:]):
            if s1 <= e0:
                raise ValueError("action intervals must be disjoint")


def _background_palette(gray):
    """Gray-green palette whose chroma stays near neutral (far from skin)."""
    r = np.clip(np.floor(0.85 * gray + 0.5), 0, 255).astype(np.uint8)
    g = np.clip(np.floor(gray + 0.5), 0, 255).astype(np.uint8)
    b = np.clip(np.floor(0.95 * gray + 0.5), 0, 255).astype(np.uint8)
    return np.stack([r, g, b], axis=-1)


class Scene:
    """Fully precomputed scenario; frames render lazily and deterministically."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        base = _mix64(cfg.seed)
        self._salt_bg = _mix64(base + 1)
        self._salt_fg = _mix64(base + 2)
        rng = Xorshift64Star(base + 3)

        w, h = cfg.frame_size
        self._jitter_radius = cfg.camera_jitter * JITTER_PERIOD / (2 * math.pi)
        self._jitter_phase = rng.uniform(0, 2 * math.pi)
        margin = math.ceil(self._jitter_radius) + 2
        self._margin = margin
        self._canvas = self._build_canvas(w + 2 * margin, h + 2 * margin)

        self.intervals = sorted(cfg.action_intervals)
        self._interval_of = np.full(cfg.num_frames, -1, dtype=np.int64)
        for idx, (start, end) in enumerate(self.intervals):
            self._interval_of[start : end + 1] = idx

        self._anchors = []
        self._phases = []
        self._spins = []
        for _ in self.intervals:
            ax = rng.randint(_ANCHOR_MARGIN, w - 1 - _ANCHOR_MARGIN)
            ay = rng.randint(_ANCHOR_MARGIN, h - 1 - _ANCHOR_MARGIN)
            self._anchors.append((ax, ay))
            self._phases.append(rng.uniform(0, 2 * math.pi))
            self._spins.append(1 if rng.next_u64() % 2 == 0 else -1)

        self.gaze = self._build_gaze(rng)
        self.ground_truth = [
            GroundTruthSegment(f"action-{i + 1}", start, end)
            for i, (start, end) in enumerate(self.intervals)
        ]
        self.skin_pixels = self._skin_samples(rng)
        self.nonskin_pixels = self._nonskin_samples(rng)

    # -- deterministic scene geometry -------------------------------------

    def _build_canvas(self, cw, ch):
        cell = max(1, int(round(self.cfg.background_texture_scale)))
        rows = np.arange(-(-ch // cell))
        cols = np.arange(-(-cw // cell))
        gray = _GRAY_LO + _GRAY_SPAN * _hash_grid(self._salt_bg, rows, cols)
        rgb = _background_palette(gray)
        return np.repeat(np.repeat(rgb, cell, axis=0), cell, axis=1)[:ch, :cw]

    def camera_offset(self, t):
        if self.cfg.camera_jitter == 0:
            return 0, 0
        a = 2 * math.pi * t / JITTER_PERIOD + self._jitter_phase
        return (
            int(round(self._jitter_radius * math.cos(a))),
            int(round(self._jitter_radius * math.sin(a))),
        )

    def blob_center(self, t):
        """Float blob center at frame t, or None outside action intervals."""
        idx = int(self._interval_of[t])
        if idx < 0:
            return None
        start = self.intervals[idx][0]
        omega = self.cfg.foreground_speed / ORBIT_RADIUS
        a = self._spins[idx] * omega * (t - start) + self._phases[idx]
        ax, ay = self._anchors[idx]
        return (ax + ORBIT_RADIUS * math.cos(a), ay + ORBIT_RADIUS * math.sin(a))

    def _build_gaze(self, rng):
        w, h = self.cfg.frame_size
        samples = []
        rest_run = 0
        rest_count = 0
        fix = (w // 2, h // 2)
        for t in range(self.cfg.num_frames):
            center = self.blob_center(t)
            if center is not None:
                idx = int(self._interval_of[t])
                start = self.intervals[idx][0]
                if (t - start) % FIXATION_REFRESH == 0:
                    fix = (
                        min(max(int(round(center[0])), 0), w - 1),
                        min(max(int(round(center[1])), 0), h - 1),
                    )
                samples.append(GazeSample(t, fix[0], fix[1], True))
                rest_run = 0
            else:
                if rest_run % REST_REFRESH == 0:
                    fix = (
                        rng.randint(40, w - 41),
                        rng.randint(40, h - 41),
                    )
                valid = rest_count % SACCADE_EVERY != SACCADE_EVERY - 1
                samples.append(GazeSample(t, fix[0], fix[1], valid))
                rest_run += 1
                rest_count += 1
        return samples

    # -- rendering ---------------------------------------------------------

    def frame_rgb(self, t):
        w, h = self.cfg.frame_size
        ox, oy = self.camera_offset(t)
        m = self._margin
        rgb = self._canvas[m + oy : m + oy + h, m + ox : m + ox + w].copy()
        mask = self.blob_mask(t)
        if mask is not None:
            self._paint_blob(rgb, mask, self.blob_center(t))
        return rgb

    def blob_mask(self, t):
        """Boolean blob-coverage mask for frame t, or None on rest frames."""
        center = self.blob_center(t)
        if center is None:
            return None
        w, h = self.cfg.frame_size
        cx, cy = center
        xs = np.arange(w, dtype=np.float64)
        ys = np.arange(h, dtype=np.float64)
        dist2 = (ys[:, None] - cy) ** 2 + (xs[None, :] - cx) ** 2
        return dist2 <= BLOB_RADIUS * BLOB_RADIUS

    def _paint_blob(self, rgb, mask, center):
        cx, cy = center
        ys, xs = np.nonzero(mask)
        cell = max(1, int(round(self.cfg.background_texture_scale)))
        li = np.round(ys - cy).astype(np.int64) // cell
        lj = np.round(xs - cx).astype(np.int64) // cell
        # hash local (blob-attached) cells so the texture translates rigidly
        scale = 0.75 + 0.5 * _hash_pairs(self._salt_fg, li, lj)
        color = np.asarray(self.cfg.skin_color, dtype=np.float64)
        pix = np.clip(np.floor(scale[:, None] * color[None, :] + 0.5), 0, 255)
        rgb[ys, xs] = pix.astype(np.uint8)

    def frame(self, t):
        rgb = self.frame_rgb(t)
        y, u, v = rgb_planes_to_yuv(rgb)
        w, h = self.cfg.frame_size
        return Frame(index=t, width=w, height=h, y_plane=y, u_plane=u, v_plane=v)

    def frames(self):
        return [self.frame(t) for t in range(self.cfg.num_frames)]

    # -- training samples ----------------------------------------------------

    def _skin_samples(self, rng):
        """Chroma samples from the blob's analytic appearance model."""
        color = np.asarray(self.cfg.skin_color, dtype=np.float64)
        scales = np.array([rng.uniform(0.75, 1.25) for _ in range(SAMPLES_PER_CLASS)])
        rgb = np.clip(np.floor(scales[:, None] * color[None, :] + 0.5), 0, 255)
        return _rgb_rows_to_uv(rgb)

    def _nonskin_samples(self, rng):
        grays = np.array([rng.uniform(_GRAY_LO, _GRAY_LO + _GRAY_SPAN)
                          for _ in range(SAMPLES_PER_CLASS)])
        rgb = _background_palette(grays[:, None]).reshape(-1, 3).astype(np.float64)
        return _rgb_rows_to_uv(rgb)


def _hash_pairs(salt, ii, jj):
    """Stateless per-pair values in [0, 1) keyed on (salt, i, j)."""
    i = np.asarray(ii, dtype=np.int64).astype(np.uint64)
    j = np.asarray(jj, dtype=np.int64).astype(np.uint64)
    h = _mix64_vec(np.uint64(salt) ^ (i * np.uint64(_GOLDEN)))
    h = _mix64_vec(h ^ (j * np.uint64(0xC2B2AE3D27D4EB4F)))
    return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _rgb_rows_to_uv(rgb_rows):
    img = rgb_rows.reshape(-1, 1, 3).astype(np.uint8)
    _, u, v = rgb_planes_to_yuv(img)
    return [(int(a), int(b)) for a, b in zip(u.reshape(-1), v.reshape(-1))]


def generate(cfg: ScenarioConfig):
    """Materialize a scenario: frames, gaze, ground truth and chroma samples."""
    scene = Scene(cfg)
    return (
        scene.frames(),
        scene.gaze,
        scene.ground_truth,
        scene.skin_pixels,
        scene.nonskin_pixels,
    )


def default_scenario(seed, num_frames=300, num_actions=3):
    """Scenario with evenly slotted action intervals derived from the seed."""
    if num_frames < 30 + 90 * num_actions:
        raise ValueError("num_frames too small for the requested action count")
    rng = Xorshift64Star(_mix64(seed) + 17)
    slot = (num_frames - 30) // num_actions
    intervals = []
    for i in range(num_actions):
        start = 20 + i * slot + rng.randint(0, 15)
        length = 40 + rng.randint(0, 12)
        intervals.append((start, start + length - 1))
    return ScenarioConfig(seed=seed, num_frames=num_frames,
                          action_intervals=tuple(intervals))


def write_scenario(cfg: ScenarioConfig, out_dir, fps=30):
    """Render a scenario into a pipeline-ready input directory.

    Writes the frame manifest and PPM files, the gaze and ground-truth CSVs,
    the chroma sample CSVs, and a skin model trained on those samples.
    """
    out = Path(out_dir)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    scene = Scene(cfg)
    w, h = cfg.frame_size
    names = []
    for t in range(cfg.num_frames):
        name = f"frames/frame_{t:05d}.ppm"
        write_ppm(out / name, scene.frame_rgb(t))
        names.append(name)
    manifest = {"frames": names, "width": w, "height": h, "fps": fps}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    write_gaze_track(out / "gaze.csv", scene.gaze)
    write_ground_truth(out / "ground_truth.csv", scene.ground_truth)
    write_pixel_samples(out / "skin_samples.csv", scene.skin_pixels)
    write_pixel_samples(out / "nonskin_samples.csv", scene.nonskin_pixels)
    model = train_skin_model(scene.skin_pixels, scene.nonskin_pixels)
    save_skin_model(out / "skin_model.json", model)
    return out
