import numpy as np
import pytest

from gazecut.cut_detector import ActionSegment, FrameFeatures, Thresholds
from gazecut.evaluation import (
    EvalCounts,
    align_score,
    cut_flags,
    evaluate_combination,
    is_aligned,
    metrics,
    score_video,
    sweep,
)
from gazecut.frame_io import GroundTruthSegment


def gt(start, end, label="x"):
    return GroundTruthSegment(label, start, end)


def seg(start, end):
    return ActionSegment(start, end)


class TestIsAligned:
    def test_identity(self):
        assert is_aligned(seg(0, 9), gt(0, 9))

    def test_exact_half_overlap_is_aligned(self):
        assert is_aligned(seg(50, 149), gt(0, 99))

    def test_small_overlap_not_aligned(self):
        assert not is_aligned(seg(90, 189), gt(0, 99))


class TestAlignScore:
    def test_perfect(self):
        assert align_score(gt(0, 99), [seg(0, 99)]) == 1.0

    def test_half_shifted_segment(self):
        assert align_score(gt(0, 99), [seg(50, 149)]) == pytest.approx(1 / 3)

    def test_two_half_covering_segments_boundary(self):
        score = align_score(gt(0, 99), [seg(0, 49), seg(50, 99)])
        assert score == 0.5

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            align_score(gt(0, 9), [])


class TestScoreVideo:
    def test_perfect_match(self):
        counts = score_video([seg(0, 99)], [gt(0, 99)])
        assert (counts.tp, counts.fp, counts.fn) == (1, 0, 0)

    def test_unpaired_gt_is_fn(self):
        counts = score_video([], [gt(0, 99)])
        assert (counts.tp, counts.fp, counts.fn) == (0, 0, 1)

    def test_mixed_outcome(self):
        counts = score_video(
            [seg(50, 149), seg(200, 299)], [gt(0, 99), gt(200, 299, "y")]
        )
        assert (counts.tp, counts.fp, counts.fn) == (1, 1, 0)

    def test_rest_state_segments_ignored(self):
        counts = score_video([seg(500, 600)], [gt(0, 99)])
        assert (counts.tp, counts.fp, counts.fn) == (0, 0, 1)

    def test_straddling_segment_assigned_to_larger_overlap(self):
        # segment [90,109] overlaps gt1 by 10 and gt2 by 10 -> tie -> lower start
        counts, outcomes = score_video(
            [seg(90, 109)], [gt(0, 99), gt(100, 199, "y")], detailed=True
        )
        assert outcomes[0].aligned == [seg(90, 109)]
        assert outcomes[1].aligned == []

    def test_unsorted_segments_rejected(self):
        with pytest.raises(ValueError):
            score_video([seg(10, 20), seg(5, 8)], [gt(0, 99)])

    def test_overlapping_gts_rejected(self):
        with pytest.raises(ValueError):
            score_video([], [gt(0, 10), gt(5, 20)])

    def test_every_gt_gets_exactly_one_outcome(self):
        # each ground truth is exactly one of TP, FP (bad alignment) or FN
        rng = np.random.default_rng(51)
        for _ in range(100):
            gts, segments = random_instance(rng)
            counts = score_video(segments, gts)
            assert counts.tp + counts.fp + counts.fn == len(gts)
            assert counts.tp + counts.fp <= len(gts)


def random_instance(rng, max_frames=200, max_gts=6):
    """Random disjoint sorted gts and segments on a small frame range."""

    def random_intervals(count):
        edges = sorted(rng.choice(max_frames, size=2 * count, replace=False))
        return [(int(edges[2 * i]), int(edges[2 * i + 1])) for i in range(count)]

    n_gt = int(rng.integers(0, max_gts + 1))
    n_seg = int(rng.integers(0, max_gts + 1))
    gts = [gt(s, e, f"g{i}") for i, (s, e) in enumerate(random_intervals(n_gt))]
    segments = [seg(s, e) for s, e in random_intervals(n_seg)]
    return gts, segments


def brute_force_score(segments, gts):
    """Frame-set reference implementation of the alignment protocol."""
    seg_frames = [set(range(s.start, s.end + 1)) for s in segments]
    gt_frames = [set(range(g.start, g.end + 1)) for g in gts]
    attached = {i: [] for i in range(len(gts))}
    for si, sf in enumerate(seg_frames):
        aligned = [gi for gi, gf in enumerate(gt_frames)
                   if len(sf & gf) / len(sf) >= 0.5]
        if not aligned:
            continue
        best = max(aligned, key=lambda gi: (len(sf & gt_frames[gi]), -gts[gi].start))
        attached[best].append(si)
    counts = EvalCounts()
    for gi, gf in enumerate(gt_frames):
        if not attached[gi]:
            counts.fn += 1
            continue
        inter = sum(len(gf & seg_frames[si]) for si in attached[gi])
        union = sum(len(gf | seg_frames[si]) for si in attached[gi])
        if inter / union >= 0.5:
            counts.tp += 1
        else:
            counts.fp += 1
    return counts


class TestBruteForceOracle:
    def test_agreement_on_random_instances(self):
        rng = np.random.default_rng(52)
        for _ in range(200):
            gts, segments = random_instance(rng)
            fast = score_video(segments, gts)
            slow = brute_force_score(segments, gts)
            assert (fast.tp, fast.fp, fast.fn) == (slow.tp, slow.fp, slow.fn)


class TestMetrics:
    def test_reported_shape(self):
        recall, precision, f_measure = metrics(EvalCounts(tp=67, fp=24, fn=33))
        assert recall == pytest.approx(0.67)
        assert precision == pytest.approx(0.736, abs=5e-4)
        assert f_measure == pytest.approx(0.70, abs=5e-3)

    def test_empty_counts(self):
        assert metrics(EvalCounts()) == (0.0, 0.0, 0.0)

    def test_perfect(self):
        assert metrics(EvalCounts(tp=1)) == (1.0, 1.0, 1.0)


def synthetic_features(rng, n=60):
    feats = []
    for k in range(n):
        feats.append(FrameFeatures(
            frame_index=k,
            phi=float(rng.random()),
            upsilon=float(rng.random()),
            fpr_med=float(rng.random()),
            sdm_med=float(rng.random()),
        ))
    return feats


class TestSweep:
    def test_single_combination_matches_direct_run(self):
        rng = np.random.default_rng(53)
        feats = synthetic_features(rng)
        gts = [gt(10, 30)]
        results = sweep([feats], [gts], grid_a=[0.4], grid_b=[0.2],
                        grid_d=[0.3], fixed_phi=0.05)
        assert len(results) == 1
        direct = evaluate_combination(
            [feats], [gts], Thresholds(t_a=0.4, t_b=0.2, t_c=0.05, t_d=0.3)
        )
        got = results[0].counts
        assert (got.tp, got.fp, got.fn) == (direct.tp, direct.fp, direct.fn)

    def test_default_grid_cardinality(self):
        feats = synthetic_features(np.random.default_rng(54), n=12)
        results = sweep([feats], [[gt(2, 6)]])
        assert len(results) == 729

    def test_flags_match_decide_cut(self):
        from gazecut.cut_detector import decide_cut

        rng = np.random.default_rng(55)
        feats = synthetic_features(rng, n=40)
        feats[3].phi = None
        thresholds = Thresholds(t_a=0.5, t_b=0.5, t_c=0.5, t_d=0.5)
        assert cut_flags(feats, thresholds) == [decide_cut(f, thresholds) for f in feats]

    def test_metrics_invariant_under_video_reordering(self):
        rng = np.random.default_rng(56)
        feats_a = synthetic_features(rng)
        feats_b = synthetic_features(rng)
        gts_a = [gt(5, 20)]
        gts_b = [gt(30, 50)]
        fwd = sweep([feats_a, feats_b], [gts_a, gts_b], grid_a=[0.3],
                    grid_b=[0.1], grid_d=[0.1])
        rev = sweep([feats_b, feats_a], [gts_b, gts_a], grid_a=[0.3],
                    grid_b=[0.1], grid_d=[0.1])
        assert fwd[0].counts == rev[0].counts
        assert fwd[0].f_measure == rev[0].f_measure
