"""Extraction of the fixed-size region-of-interest around a gaze fixation."""

from dataclasses import dataclass

import numpy as np

from .frame_io import Frame, GazeSample

REGION_SIZE = 56
_HALF = REGION_SIZE // 2


@dataclass
class GazeRegion:
    """A 56x56 crop of the Y, U, V planes around a fixation point."""

    frame_index: int
    origin_x: int
    origin_y: int
    y_patch: np.ndarray
    u_patch: np.ndarray
    v_patch: np.ndarray


def extract_region(frame: Frame, sample: GazeSample):
    """Crop the gaze window from a frame, or None during a saccade.

    The nominal origin is (x-28, y-28); near the frame border the window is
    shifted inward so the crop is always exactly 56x56.
    """
    if frame.index != sample.frame_index:
        raise ValueError(
            f"frame index {frame.index} does not match gaze sample {sample.frame_index}"
        )
    if not sample.valid:
        return None
    if not (0 <= sample.x < frame.width and 0 <= sample.y < frame.height):
        raise ValueError(
            f"frame {frame.index}: fixation ({sample.x},{sample.y}) outside "
            f"{frame.width}x{frame.height} frame"
        )
    ox = min(max(sample.x - _HALF, 0), frame.width - REGION_SIZE)
    oy = min(max(sample.y - _HALF, 0), frame.height - REGION_SIZE)
    sl = (slice(oy, oy + REGION_SIZE), slice(ox, ox + REGION_SIZE))
    return GazeRegion(
        frame_index=frame.index,
        origin_x=ox,
        origin_y=oy,
        y_patch=frame.y_plane[sl].copy(),
        u_patch=frame.u_plane[sl].copy(),
        v_patch=frame.v_plane[sl].copy(),
    )
