import numpy as np
import pytest

from gazecut.entropy_filters import (
    EdgeMap,
    SkinModel,
    canny,
    edge_ratio,
    hand_score,
    load_skin_model,
    posterior_table,
    save_skin_model,
    skin_posterior,
    train_skin_model,
)
from gazecut.frame_io import InputError
from gazecut.gaze_region import GazeRegion


def make_region(u_value=100, v_value=150):
    patch = np.zeros((56, 56), dtype=np.uint8)
    return GazeRegion(
        frame_index=0,
        origin_x=0,
        origin_y=0,
        y_patch=patch,
        u_patch=np.full((56, 56), u_value, dtype=np.uint8),
        v_patch=np.full((56, 56), v_value, dtype=np.uint8),
    )


class TestCanny:
    def test_constant_region_no_edges(self):
        edges = canny(np.full((56, 56), 77, dtype=np.uint8))
        assert edges.nzp == 0

    def test_vertical_step_edge_thin_line(self):
        patch = np.zeros((56, 56), dtype=np.uint8)
        patch[:, 28:] = 100
        edges = canny(patch)
        assert 50 <= edges.nzp <= 62

    def test_checkerboard_high_threshold_rejects_all(self):
        patch = np.indices((56, 56)).sum(axis=0) % 2 * 255
        edges = canny(patch.astype(np.uint8), low=1e5, high=1e6)
        assert edges.nzp == 0

    def test_deterministic(self):
        rng = np.random.default_rng(31)
        patch = rng.integers(0, 256, (56, 56)).astype(np.uint8)
        a = canny(patch)
        b = canny(patch)
        assert np.array_equal(a.bits, b.bits)
        assert a.nzp == b.nzp

    def test_invalid_thresholds(self):
        with pytest.raises(ValueError):
            canny(np.zeros((56, 56)), low=10, high=5)

    def test_nzp_counts_bits(self):
        rng = np.random.default_rng(32)
        patch = rng.integers(0, 256, (56, 56)).astype(np.uint8)
        edges = canny(patch)
        assert edges.nzp == int(edges.bits.sum())


class TestEdgeRatio:
    def test_extremes(self):
        zeros = EdgeMap(np.zeros((56, 56), dtype=bool), 0)
        ones = EdgeMap(np.ones((56, 56), dtype=bool), 3136)
        assert edge_ratio(zeros) == 0.0
        assert edge_ratio(ones) == 1.0

    def test_near_reference_threshold(self):
        bits = np.zeros((56, 56), dtype=bool)
        bits.ravel()[:157] = True
        assert edge_ratio(EdgeMap(bits, 157)) == pytest.approx(0.0501, abs=5e-5)


class TestTrainer:
    def test_bin_placement(self):
        model = train_skin_model([(100, 150)] * 100, [(0, 0)], bins_per_axis=32)
        assert model.skin_hist[12, 18] == 100
        assert model.skin_hist.sum() == 100

    def test_empty_skin_list_rejected(self):
        with pytest.raises(InputError):
            train_skin_model([], [(0, 0)])

    def test_empty_nonskin_list_rejected(self):
        with pytest.raises(InputError):
            train_skin_model([(1, 1)], [])

    def test_identical_training_sets_give_prior(self):
        pixels = [(10, 20), (100, 150), (10, 20), (200, 40)]
        model = train_skin_model(pixels, pixels, prior_skin=0.3)
        for u, v in [(10, 20), (100, 150), (255, 255)]:
            assert skin_posterior(u, v, model) == pytest.approx(0.3, rel=1e-12)

    def test_histogram_sums_match_sample_counts(self):
        rng = np.random.default_rng(33)
        skin = [tuple(p) for p in rng.integers(0, 256, (57, 2))]
        nonskin = [tuple(p) for p in rng.integers(0, 256, (91, 2))]
        model = train_skin_model(skin, nonskin)
        assert model.skin_hist.sum() == 57
        assert model.nonskin_hist.sum() == 91


def crafted_model(skin_counts, nonskin_counts, prior=0.5, bins=4):
    skin = np.zeros((bins, bins), dtype=np.int64)
    nonskin = np.zeros((bins, bins), dtype=np.int64)
    for (i, j), c in skin_counts.items():
        skin[i, j] = c
    for (i, j), c in nonskin_counts.items():
        nonskin[i, j] = c
    return SkinModel(bins_per_axis=bins, skin_hist=skin,
                     nonskin_hist=nonskin, prior_skin=prior)


class TestPosterior:
    def test_symmetric_case_gives_half(self):
        model = crafted_model({(0, 0): 5}, {(0, 0): 5})
        assert skin_posterior(0, 0, model) == pytest.approx(0.5, rel=1e-12)

    def test_dominant_skin_bin_near_one(self):
        model = crafted_model({(0, 0): 1000}, {(3, 3): 1000})
        p = skin_posterior(0, 0, model)
        assert 0.99 < p < 1.0

    def test_two_to_one_likelihood_ratio(self):
        # totals 100 each; counts 2 vs 1 in bin (0,0); smoothing disabled
        model = crafted_model({(0, 0): 2, (3, 3): 98}, {(0, 0): 1, (3, 3): 99})
        assert skin_posterior(0, 0, model, laplace=0.0) == pytest.approx(2 / 3, rel=1e-12)

    def test_complementarity(self):
        rng = np.random.default_rng(34)
        skin = [tuple(p) for p in rng.integers(0, 256, (500, 2))]
        nonskin = [tuple(p) for p in rng.integers(0, 256, (500, 2))]
        model = train_skin_model(skin, nonskin)
        table = posterior_table(model)
        flipped = SkinModel(model.bins_per_axis, model.nonskin_hist,
                            model.skin_hist, 1 - model.prior_skin)
        table_flipped = posterior_table(flipped)
        assert np.abs(table + table_flipped - 1).max() < 1e-12

    def test_monotone_in_skin_count(self):
        prev = None
        for count in (1, 5, 20, 100):
            model = crafted_model({(1, 1): count, (2, 2): 100},
                                  {(1, 1): 50, (2, 2): 100})
            p = skin_posterior(64, 64, model)  # bin (1,1) with 4 bins
            if prev is not None:
                assert p >= prev
            prev = p

    def test_scaling_invariance_without_smoothing(self):
        base = crafted_model({(0, 0): 3, (1, 2): 7}, {(0, 0): 4, (2, 1): 6})
        scaled = crafted_model({(0, 0): 30, (1, 2): 70}, {(0, 0): 40, (2, 1): 60})
        for u in range(0, 256, 37):
            for v in range(0, 256, 37):
                assert skin_posterior(u, v, base, laplace=0.0) == skin_posterior(
                    u, v, scaled, laplace=0.0
                )


class TestHandScore:
    def test_all_skin_pixels(self):
        model = crafted_model({(1, 2): 10}, {(3, 3): 10})
        region = make_region(u_value=96, v_value=160)  # bin (1, 2) with 4 bins
        assert hand_score(region, model, laplace=0.0) == 1.0

    def test_all_nonskin_pixels(self):
        model = crafted_model({(1, 2): 10}, {(3, 3): 10})
        region = make_region(u_value=255, v_value=255)  # bin (3, 3)
        assert hand_score(region, model, laplace=0.0) == 0.0

    def test_half_and_half_mean(self):
        # bin A posterior 0.8 (skin 4x nonskin), bin B posterior 0
        model = crafted_model({(0, 0): 4, (3, 3): 6}, {(0, 0): 1, (2, 2): 9})
        region = make_region()
        region.u_patch[:, :28] = 0     # bin (0,0): posterior 0.8
        region.v_patch[:, :28] = 0
        region.u_patch[:, 28:] = 160   # bin (2,2): skin likelihood 0
        region.v_patch[:, 28:] = 160
        # totals equal (10 each) so likelihoods are proportional to counts
        assert hand_score(region, model, laplace=0.0) == pytest.approx(0.4, rel=1e-12)

    def test_score_in_unit_interval(self):
        rng = np.random.default_rng(35)
        skin = [tuple(p) for p in rng.integers(0, 256, (200, 2))]
        nonskin = [tuple(p) for p in rng.integers(0, 256, (200, 2))]
        model = train_skin_model(skin, nonskin)
        for _ in range(20):
            region = make_region()
            region.u_patch[:] = rng.integers(0, 256, (56, 56)).astype(np.uint8)
            region.v_patch[:] = rng.integers(0, 256, (56, 56)).astype(np.uint8)
            assert 0 <= hand_score(region, model) <= 1


class TestModelSerialization:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(36)
        skin = [tuple(p) for p in rng.integers(0, 256, (100, 2))]
        nonskin = [tuple(p) for p in rng.integers(0, 256, (100, 2))]
        model = train_skin_model(skin, nonskin, bins_per_axis=16, prior_skin=0.4)
        path = tmp_path / "model.json"
        save_skin_model(path, model)
        loaded = load_skin_model(path)
        assert loaded.bins_per_axis == 16
        assert loaded.prior_skin == 0.4
        assert np.array_equal(loaded.skin_hist, model.skin_hist)
        assert np.array_equal(loaded.nonskin_hist, model.nonskin_hist)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            load_skin_model(tmp_path / "nope.json")
