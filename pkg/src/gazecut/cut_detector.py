"""Median smoothing, the four-way threshold test and segment assembly.

A frame qualifies when all four per-frame values clear their thresholds at
once; the two motion parameters enter after 9-frame median smoothing, the
two filter scores enter raw. Maximal runs of qualifying frames become action
segments: the run's first frame is the start cut, its last the end cut.
"""

from dataclasses import dataclass

MEDIAN_HALF_WINDOW = 4  # 9-frame window: k-4 .. k+4
MIN_WINDOW_SUPPORT = 3


@dataclass(frozen=True)
class Thresholds:
    t_a: float = 0.30  # foreground pixel ratio
    t_b: float = 0.10  # standard deviation of motions
    t_c: float = 0.05  # edge ratio
    t_d: float = 0.10  # hand score

    def __post_init__(self):
        for name in ("t_a", "t_b", "t_c", "t_d"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0,1], got {value}")


@dataclass
class FrameFeatures:
    """Per-frame parameter record; None marks an unavailable value."""

    frame_index: int
    fpr_raw: float | None = None
    sdm_raw: float | None = None
    phi: float | None = None
    upsilon: float | None = None
    fpr_med: float | None = None
    sdm_med: float | None = None
    cut_flag: bool = False


@dataclass(frozen=True)
class ActionSegment:
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"segment start {self.start} > end {self.end}")


def median_smooth(series, k):
    """Median of the available values in the 9-frame window centered on k.

    The window truncates at the sequence boundaries; unavailable frames
    (None) contribute nothing. Fewer than 3 available values yields None.
    Even counts take the mean of the two central values.
    """
    lo = max(k - MEDIAN_HALF_WINDOW, 0)
    hi = min(k + MEDIAN_HALF_WINDOW, len(series) - 1)
    values = [series[i] for i in range(lo, hi + 1) if series[i] is not None]
    if len(values) < MIN_WINDOW_SUPPORT:
        return None
    values.sort()
    n = len(values)
    if n % 2 == 1:
        return values[n // 2]
    return (values[n // 2 - 1] + values[n // 2]) / 2


def decide_cut(features: FrameFeatures, t: Thresholds) -> bool:
    """All four values available and at or above their thresholds."""
    values = (features.fpr_med, features.sdm_med, features.phi, features.upsilon)
    if any(v is None for v in values):
        return False
    fpr_med, sdm_med, phi, upsilon = values
    return fpr_med >= t.t_a and sdm_med >= t.t_b and phi >= t.t_c and upsilon >= t.t_d


def assemble_segments(flags, min_run=1):
    """Turn maximal runs of qualifying frames into segments.

    Start and end cuts alternate by construction: each run contributes its
    first frame as a start and its last frame as an end. Runs shorter than
    min_run are discarded.
    """
    if min_run < 1:
        raise ValueError("min_run must be >= 1")
    segments = []
    run_start = None
    for i, flag in enumerate(flags):
        if flag and run_start is None:
            run_start = i
        elif not flag and run_start is not None:
            if i - run_start >= min_run:
                segments.append(ActionSegment(run_start, i - 1))
            run_start = None
    if run_start is not None and len(flags) - run_start >= min_run:
        segments.append(ActionSegment(run_start, len(flags) - 1))
    return segments
