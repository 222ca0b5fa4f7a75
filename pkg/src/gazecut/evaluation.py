"""Scoring discovered segments against labeled ground truth.

A discovered segment is aligned to a ground-truth interval when at least
half of the segment's frames fall inside it. Each ground truth is then
scored by the ratio of summed intersections to summed unions over its
aligned segments; 0.5 or better is a true positive, less is a false
positive, and a ground truth with no aligned segment is a false negative.
Discovered segments aligned to no ground truth (rest-state detections) are
ignored.
"""

from dataclasses import dataclass

from .cut_detector import ActionSegment, Thresholds, assemble_segments, decide_cut
from .frame_io import GroundTruthSegment

ALIGNMENT_GATE = 0.5
ACCEPT_SCORE = 0.5


@dataclass
class EvalCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, other):
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn


@dataclass
class GtOutcome:
    """Per-ground-truth detail for the evaluation report."""

    gt: GroundTruthSegment
    aligned: list
    align_score: float | None
    outcome: str  # "TP" | "FP" | "FN"


@dataclass
class SweepResult:
    thresholds: Thresholds
    counts: EvalCounts
    recall: float
    precision: float
    f_measure: float


def _length(start, end):
    return end - start + 1


def _intersection(a_start, a_end, b_start, b_end):
    return max(0, min(a_end, b_end) - max(a_start, b_start) + 1)


def is_aligned(segment: ActionSegment, gt: GroundTruthSegment) -> bool:
    """True when the segment shares at least half of its own frames with gt."""
    inter = _intersection(segment.start, segment.end, gt.start, gt.end)
    return inter / _length(segment.start, segment.end) >= ALIGNMENT_GATE


def align_score(gt: GroundTruthSegment, aligned) -> float:
    """Summed intersections over summed unions across the aligned segments."""
    if not aligned:
        raise ValueError("align_score requires at least one aligned segment")
    inter_sum = 0
    union_sum = 0
    gt_len = _length(gt.start, gt.end)
    for seg in aligned:
        inter = _intersection(seg.start, seg.end, gt.start, gt.end)
        inter_sum += inter
        union_sum += gt_len + _length(seg.start, seg.end) - inter
    return inter_sum / union_sum


def _check_sorted_disjoint(intervals, what):
    prev_end = None
    for iv in intervals:
        if prev_end is not None and iv.start <= prev_end:
            raise ValueError(f"{what} must be sorted and disjoint")
        prev_end = iv.end


def score_video(segments, gts, detailed=False):
    """Count TP/FP/FN for one video.

    Each discovered segment is assigned to the aligned ground truth with the
    largest overlap (lower start index on ties); segments aligned to nothing
    are ignored as rest-state detections.
    """
    _check_sorted_disjoint(segments, "segments")
    _check_sorted_disjoint(gts, "ground-truth segments")
    attached = {i: [] for i in range(len(gts))}
    for seg in segments:
        candidates = [i for i, gt in enumerate(gts) if is_aligned(seg, gt)]
        if not candidates:
            continue
        best = max(
            candidates,
            key=lambda i: (
                _intersection(seg.start, seg.end, gts[i].start, gts[i].end),
                -gts[i].start,
            ),
        )
        attached[best].append(seg)

    counts = EvalCounts()
    outcomes = []
    for i, gt in enumerate(gts):
        if not attached[i]:
            counts.fn += 1
            outcomes.append(GtOutcome(gt, [], None, "FN"))
            continue
        score = align_score(gt, attached[i])
        if score >= ACCEPT_SCORE:
            counts.tp += 1
            outcomes.append(GtOutcome(gt, attached[i], score, "TP"))
        else:
            counts.fp += 1
            outcomes.append(GtOutcome(gt, attached[i], score, "FP"))
    if detailed:
        return counts, outcomes
    return counts


def metrics(counts: EvalCounts):
    """(recall, precision, f_measure); 0/0 ratios are defined as 0."""
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    if recall + precision > 0:
        f_measure = 2 * recall * precision / (recall + precision)
    else:
        f_measure = 0.0
    return recall, precision, f_measure


DEFAULT_GRID = tuple(round(0.1 * k, 2) for k in range(1, 10))
DEFAULT_FIXED_PHI = 0.05


def cut_flags(features, thresholds: Thresholds):
    """Vector of per-frame cut decisions for one feature series."""
    return [decide_cut(f, thresholds) for f in features]


def evaluate_combination(per_video_features, per_video_gts, thresholds, min_run=1):
    """Run cut detection and scoring for one threshold combination."""
    total = EvalCounts()
    for features, gts in zip(per_video_features, per_video_gts):
        flags = cut_flags(features, thresholds)
        segments = assemble_segments(flags, min_run=min_run)
        total.add(score_video(segments, gts))
    return total


def sweep(per_video_features, per_video_gts, grid_a=DEFAULT_GRID,
          grid_b=DEFAULT_GRID, grid_d=DEFAULT_GRID,
          fixed_phi=DEFAULT_FIXED_PHI, min_run=1):
    """Evaluate every combination of the threshold grid.

    Per-frame features are computed once by the caller and reused across all
    combinations; counts are pooled over videos before computing metrics.
    """
    results = []
    for t_a in grid_a:
        for t_b in grid_b:
            for t_d in grid_d:
                thresholds = Thresholds(t_a=t_a, t_b=t_b, t_c=fixed_phi, t_d=t_d)
                counts = evaluate_combination(
                    per_video_features, per_video_gts, thresholds, min_run=min_run
                )
                recall, precision, f_measure = metrics(counts)
                results.append(SweepResult(thresholds, counts, recall,
                                           precision, f_measure))
    return results
