import numpy as np
import pytest

from lumaseg.core import ChannelPlane, Histogram, build_histogram, to_cdf
from lumaseg.global_enhance import (
    IntensityMap,
    apply_map,
    equalization_map,
    equalize,
    gaussian_target,
    load_target_histogram,
    specification_map,
    specify,
)
from oracles import direct_equalization_table, naive_equalize


def hist(counts):
    return Histogram(counts=np.asarray(counts, dtype=np.float64))


def plane(values, range=(0.0, 1.0)):
    return ChannelPlane(values=np.asarray(values, dtype=np.float64), range=range)


def random_histogram(rng, max_bins=32):
    bins = int(rng.integers(2, max_bins + 1))
    counts = rng.integers(0, 30, size=bins).astype(float)
    if counts.sum() == 0:
        counts[int(rng.integers(bins))] = 1
    return hist(counts)


class TestIntensityMap:
    def test_rejects_decreasing_table(self):
        with pytest.raises(ValueError):
            IntensityMap(table=np.array([1, 0]))

    def test_rejects_out_of_range_entries(self):
        with pytest.raises(ValueError):
            IntensityMap(table=np.array([0, 5]))


class TestEqualizationMap:
    def test_four_bin_example_matches_direct_transform(self):
        counts = [2.0, 1.0, 0.0, 1.0]
        expected = direct_equalization_table(counts, 4)
        assert expected == [1, 2, 2, 3]
        assert equalization_map(hist(counts)).table.tolist() == expected

    def test_uniform_histogram_is_identity(self):
        table = equalization_map(hist(np.full(256, 7.0))).table
        assert np.array_equal(table, np.arange(256))

    def test_single_nonzero_bin_maps_occupied_to_top(self):
        counts = np.zeros(16)
        counts[0] = 9
        table = equalization_map(hist(counts)).table
        assert np.all(table == 15)
        # spike elsewhere: every occupied bin still lands on top
        counts = np.zeros(16)
        counts[5] = 9
        table = equalization_map(hist(counts)).table
        assert np.all(table[5:] == 15)

    def test_matches_oracle_on_random_histograms(self):
        rng = np.random.default_rng(10)
        for _ in range(300):
            h = random_histogram(rng)
            expected = direct_equalization_table(h.counts.tolist(), h.bin_count)
            assert equalization_map(h).table.tolist() == expected

    def test_rejects_empty_histogram(self):
        with pytest.raises(ValueError):
            equalization_map(hist(np.zeros(4)))


class TestApplyMap:
    def test_identity_map_quantizes_to_bin_centers(self):
        p = plane(np.linspace(0, 1, 32).reshape(4, 8))
        out = apply_map(p, IntensityMap(table=np.arange(16)))
        assert np.abs(out.values - p.values).max() <= 0.5 / 16 + 1e-12

    def test_hand_example(self):
        p = plane([[0.0, 0.0, 1.0, 3.0]], range=(0.0, 3.0))
        out = apply_map(p, IntensityMap(table=np.array([2, 2, 2, 3])))
        centers = [0.0 + (k + 0.5) * 3.0 / 4 for k in (2, 2, 2, 3)]
        assert out.values[0].tolist() == centers

    def test_constant_plane_stays_constant(self):
        out = apply_map(plane(np.full((3, 3), 0.7)), IntensityMap(table=np.arange(8)))
        assert len(np.unique(out.values)) == 1

    def test_output_range_equals_input_range(self):
        p = plane(np.linspace(-5, 10, 24).reshape(4, 6), range=(-5.0, 10.0))
        out = apply_map(p, IntensityMap(table=np.arange(12)))
        assert out.range == (-5.0, 10.0)


class TestEqualize:
    def test_constant_plane(self):
        out = equalize(plane(np.full((4, 4), 0.3)), 16)
        assert len(np.unique(out.values)) == 1
        # all mass sits in the top output bin's center
        assert out.values[0, 0] == (15 + 0.5) / 16

    def test_two_level_plane(self):
        vals = np.array([[0.25] * 8, [0.75] * 8])
        out = equalize(plane(vals), 256)
        levels = np.unique(out.values)
        assert len(levels) == 2
        expected = naive_equalize(plane(vals), 256)
        assert np.array_equal(out.values, expected)
        assert levels[0] == (127 + 0.5) / 256
        assert levels[1] == (255 + 0.5) / 256

    def test_ramp_stays_close_to_identity(self):
        vals = np.tile(np.arange(64) / 63.0, (4, 1))
        out = equalize(plane(vals), 64)
        assert np.abs(out.values - vals).max() <= 1.0 / 64 + 1e-12

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            h, w = rng.integers(1, 17, size=2)
            if h * w == 1:
                continue
            bins = int(rng.integers(2, 17))
            vals = rng.random((h, w))
            p = plane(vals)
            assert np.array_equal(equalize(p, bins).values, naive_equalize(p, bins))

    def test_idempotent(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            p = plane(rng.random((12, 12)))
            once = equalize(p, 64)
            twice = equalize(once, 64)
            assert np.abs(twice.values - once.values).max() <= 1.0 / 64 + 1e-12

    def test_monotone_order_preserved(self):
        rng = np.random.default_rng(13)
        vals = rng.random((16, 16))
        out = equalize(plane(vals), 32)
        flat_in = vals.ravel()
        flat_out = out.values.ravel()
        order = np.argsort(flat_in, kind="stable")
        assert np.all(np.diff(flat_out[order]) >= -1e-15)

    def test_dynamic_range_reaches_top_bin(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            vals = rng.random((8, 8))
            bins = int(rng.integers(2, 64))
            h = build_histogram(plane(vals), bins)
            if np.count_nonzero(h.counts) < 2:
                continue
            out = equalize(plane(vals), bins)
            top = build_histogram(out, bins)
            assert top.counts[bins - 1] > 0

    def test_ks_flattening_bound(self):
        rng = np.random.default_rng(15)
        for _ in range(30):
            vals = rng.random((16, 16)) ** rng.uniform(0.3, 3.0)
            bins = int(rng.integers(4, 64))
            p = plane(vals)
            max_p = build_histogram(p, bins).counts.max() / vals.size
            cdf = to_cdf(build_histogram(equalize(p, bins), bins)).values
            ramp = (np.arange(bins) + 1) / bins
            assert np.abs(cdf - ramp).max() <= max_p + 1e-12


class TestSpecification:
    def test_self_target_is_identity_on_occupied_bins(self):
        h = hist([2.0, 1.0, 0.0, 1.0])
        table = specification_map(h, h).table
        for k in (0, 1, 3):
            assert table[k] == k

    def test_uniform_target_reduces_to_equalization(self):
        rng = np.random.default_rng(16)
        for _ in range(200):
            h = random_histogram(rng)
            scale = int(rng.integers(1, 9))
            uniform = hist(np.full(h.bin_count, float(scale)))
            assert np.array_equal(
                specification_map(h, uniform).table, equalization_map(h).table
            )

    def test_mass_transport_example(self):
        table = specification_map(hist([4.0, 0.0, 0.0, 0.0]), hist([0.0, 0.0, 0.0, 4.0])).table
        assert table[0] == 3

    def test_table_monotone(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            bins = int(rng.integers(2, 24))
            src = hist(rng.integers(0, 9, bins).astype(float) + (rng.random(bins) < 0.2))
            tgt = hist(rng.integers(0, 9, bins).astype(float) + 0.001)
            if src.counts.sum() == 0:
                continue
            table = specification_map(src, tgt).table
            assert np.all(np.diff(table) >= 0)

    def test_bin_mismatch_errors(self):
        with pytest.raises(ValueError):
            specification_map(hist([1.0, 1.0]), hist([1.0, 1.0, 1.0]))
        with pytest.raises(ValueError):
            specify(plane([[0.5, 0.6]]), hist([1.0, 1.0, 1.0]), bin_count=4)

    def test_specify_plane_with_self_histogram(self):
        rng = np.random.default_rng(18)
        vals = rng.random((8, 8))
        p = plane(vals)
        target = build_histogram(p, 16)
        out = specify(p, target)
        # occupied bins map to themselves, so values move at most to bin centers
        assert np.abs(out.values - vals).max() <= 0.5 / 16 + 1e-12

    def test_specify_with_uniform_equals_equalize(self):
        rng = np.random.default_rng(19)
        vals = rng.random((12, 12))
        p = plane(vals)
        out_spec = specify(p, hist(np.ones(32)))
        out_eq = equalize(p, 32)
        assert np.array_equal(out_spec.values, out_eq.values)


class TestTargets:
    def test_gaussian_target_shape(self):
        t = gaussian_target(256)
        assert t.bin_count == 256
        assert t.counts.argmax() in (127, 128)
        assert abs(t.counts.sum() - 1.0) < 1e-9
        assert t.counts[0] < t.counts[128]

    def test_load_target_csv(self, tmp_path):
        path = tmp_path / "target.csv"
        path.write_text("1\n2\n3\n4\n")
        t = load_target_histogram(path)
        assert t.counts.tolist() == [1.0, 2.0, 3.0, 4.0]
        t = load_target_histogram(path, bin_count=4)
        assert t.bin_count == 4

    def test_load_target_csv_comma_layout(self, tmp_path):
        path = tmp_path / "target.csv"
        path.write_text("1,2,3,4\n")
        assert load_target_histogram(path).counts.tolist() == [1.0, 2.0, 3.0, 4.0]

    def test_load_target_rejects_bad_files(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,-2\n")
        with pytest.raises(ValueError):
            load_target_histogram(bad)
        short = tmp_path / "short.csv"
        short.write_text("5\n")
        with pytest.raises(ValueError):
            load_target_histogram(short)
        wrong = tmp_path / "wrong.csv"
        wrong.write_text("1,2,3\n")
        with pytest.raises(ValueError):
            load_target_histogram(wrong, bin_count=4)
