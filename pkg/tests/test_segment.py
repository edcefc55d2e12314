import numpy as np
import pytest

from lumaseg.colorspace import ColorSpace, rgb_to_hsv, rgb_to_lab
from lumaseg.core import ChannelPlane, RgbImage
from lumaseg.imageio import read_pgm
from lumaseg.segment import (
    FeatureMatrix,
    FeatureMode,
    KMeansParams,
    kmeans,
    extract_features,
    render_segmentation,
    save_label_map,
    segment_image,
)
from oracles import brute_force_kmeans_objective


def features(points):
    pts = np.asarray(points, dtype=np.float64)
    return FeatureMatrix(values=pts, width=pts.shape[0], height=1, provenance="test")


class TestExtractFeatures:
    def test_lab_midpoint_rescale(self):
        l = ChannelPlane(np.full((1, 1), 50.0), (0.0, 100.0))
        ab = ChannelPlane(np.zeros((1, 1)), (-128.0, 127.0))
        from lumaseg.colorspace import LabImage

        f = extract_features(LabImage(l=l, a=ab, b=ab), FeatureMode.CHROMA_LUMA)
        assert f.values.shape == (1, 3)
        assert f.values[0].tolist() == [0.5, 0.5, 0.5]

    def test_hue_wraparound_continuity(self):
        from lumaseg.colorspace import HsvImage, TAU

        def hsv_of(hue):
            return HsvImage(
                h=ChannelPlane(np.full((1, 1), hue), (0.0, TAU)),
                s=ChannelPlane(np.full((1, 1), 0.8), (0.0, 1.0)),
                v=ChannelPlane(np.full((1, 1), 0.5), (0.0, 1.0)),
            )

        f0 = extract_features(hsv_of(0.0), FeatureMode.CHROMA_LUMA)
        f1 = extract_features(hsv_of(TAU - 1e-6), FeatureMode.CHROMA_LUMA)
        assert f0.values.shape == (1, 4)
        assert np.abs(f0.values - f1.values).max() < 1e-5

    def test_constant_image_constant_rows(self):
        img = RgbImage(pixels=np.full((4, 6, 3), 123, dtype=np.uint8))
        f = extract_features(rgb_to_hsv(img))
        assert f.values.shape == (24, 4)
        assert np.all(f.values == f.values[0])

    def test_chroma_mode_drops_luma(self):
        img = RgbImage(pixels=np.full((2, 2, 3), 99, dtype=np.uint8))
        assert extract_features(rgb_to_hsv(img), FeatureMode.CHROMA).values.shape == (4, 3)
        assert extract_features(rgb_to_lab(img), FeatureMode.CHROMA).values.shape == (4, 2)

    def test_raw_mode_for_ablation(self):
        img = RgbImage(pixels=np.full((2, 2, 3), 99, dtype=np.uint8))
        f = extract_features(rgb_to_hsv(img), FeatureMode.RAW)
        assert f.values.shape == (4, 3)
        assert "h,s,v" in f.provenance


class TestKMeans:
    def test_k1_closed_form(self):
        rng = np.random.default_rng(30)
        pts = rng.random((20, 3))
        lm = kmeans(features(pts), KMeansParams(k=1, seed=0, restarts=1))
        assert np.allclose(lm.centers[0], pts.mean(axis=0))
        assert lm.objective == pytest.approx(((pts - pts.mean(axis=0)) ** 2).sum())

    def test_k_equals_rows(self):
        pts = np.array([[0.0], [0.3], [0.7], [1.0]])
        lm = kmeans(features(pts), KMeansParams(k=4, seed=0, restarts=3))
        assert lm.objective == pytest.approx(0.0, abs=1e-18)
        assert sorted(np.unique(lm.labels).tolist()) == [0, 1, 2, 3]

    def test_six_point_instance(self):
        pts = np.array([[0.0], [0.1], [0.2], [10.0], [10.1], [10.2]])
        lm = kmeans(features(pts), KMeansParams(k=2, seed=0, restarts=10))
        assert lm.labels.ravel().tolist() == [0, 0, 0, 1, 1, 1]
        assert np.allclose(sorted(lm.centers.ravel()), [0.1, 10.1])
        assert lm.objective == pytest.approx(brute_force_kmeans_objective(pts, 2))

    def test_matches_brute_force_on_small_instances(self):
        rng = np.random.default_rng(31)
        hits = 0
        trials = 40
        for _ in range(trials):
            n = int(rng.integers(4, 11))
            d = int(rng.integers(1, 4))
            k = int(rng.integers(1, 4))
            pts = rng.random((n, d))
            lm = kmeans(features(pts), KMeansParams(k=k, seed=int(rng.integers(1 << 31)), restarts=10))
            best = brute_force_kmeans_objective(pts, k)
            if lm.objective <= best * (1 + 1e-9) + 1e-12:
                hits += 1
        assert hits >= int(0.95 * trials)

    def test_determinism(self):
        rng = np.random.default_rng(32)
        pts = rng.random((50, 2))
        a = kmeans(features(pts), KMeansParams(k=3, seed=7))
        b = kmeans(features(pts), KMeansParams(k=3, seed=7))
        assert np.array_equal(a.labels, b.labels)
        assert np.array_equal(a.centers, b.centers)
        assert a.objective == b.objective

    def test_labels_canonical_by_first_occurrence(self):
        rng = np.random.default_rng(33)
        pts = rng.random((30, 2))
        lm = kmeans(features(pts), KMeansParams(k=3, seed=1))
        seen = []
        for label in lm.labels.ravel():
            if label not in seen:
                seen.append(int(label))
        assert seen == sorted(seen)

    def test_centers_are_member_means(self):
        rng = np.random.default_rng(34)
        pts = rng.random((40, 2))
        lm = kmeans(features(pts), KMeansParams(k=4, seed=2))
        labels = lm.labels.ravel()
        for j in range(lm.k):
            members = pts[labels == j]
            if len(members):
                assert np.abs(lm.centers[j] - members.mean(axis=0)).max() < 1e-9

    def test_no_profitable_single_switch(self):
        rng = np.random.default_rng(35)
        pts = rng.random((30, 2))
        lm = kmeans(features(pts), KMeansParams(k=3, seed=3))
        d2 = ((pts[:, None, :] - lm.centers[None, :, :]) ** 2).sum(axis=2)
        assigned = d2[np.arange(len(pts)), lm.labels.ravel()]
        assert np.all(assigned <= d2.min(axis=1) + 1e-12)

    def test_k_larger_than_distinct_rows_errors(self):
        pts = np.array([[0.5], [0.5], [0.5]])
        with pytest.raises(ValueError):
            kmeans(features(pts), KMeansParams(k=2))

    def test_param_validation(self):
        for bad in (
            dict(k=0),
            dict(k=1, max_iters=0),
            dict(k=1, tol=-1.0),
            dict(k=1, restarts=0),
        ):
            with pytest.raises(ValueError):
                KMeansParams(**bad)


class TestSegmentImage:
    def test_two_tone_image_two_clusters(self):
        px = np.zeros((10, 10, 3), dtype=np.uint8)
        px[:, 5:] = [200, 160, 40]
        px[:, :5] = [20, 30, 90]
        img = RgbImage(pixels=px)
        lm = segment_image(img, ColorSpace.HSV, KMeansParams(k=2, seed=0))
        assert np.all(lm.labels[:, :5] == lm.labels[0, 0])
        assert np.all(lm.labels[:, 5:] == lm.labels[0, 5])
        assert lm.labels[0, 0] != lm.labels[0, 5]

    def test_render_k1_is_mean_color(self):
        rng = np.random.default_rng(36)
        img = RgbImage(pixels=rng.integers(0, 256, (6, 6, 3), dtype=np.uint8))
        lm = segment_image(img, ColorSpace.LAB, KMeansParams(k=1, seed=0, restarts=1))
        out = render_segmentation(img, lm)
        expected = np.rint(img.pixels.reshape(-1, 3).mean(axis=0))
        assert np.all(out.pixels == expected.astype(np.uint8))

    def test_render_reproduces_two_tone_exactly(self):
        px = np.zeros((8, 8, 3), dtype=np.uint8)
        px[:, 4:] = [200, 160, 40]
        img = RgbImage(pixels=px)
        lm = segment_image(img, ColorSpace.HSV, KMeansParams(k=2, seed=0))
        assert render_segmentation(img, lm) == img

    def test_render_color_count_bounded_by_k(self):
        rng = np.random.default_rng(37)
        img = RgbImage(pixels=rng.integers(0, 256, (12, 12, 3), dtype=np.uint8))
        for k in (1, 2, 4):
            lm = segment_image(img, ColorSpace.HSV, KMeansParams(k=k, seed=0))
            out = render_segmentation(img, lm)
            distinct = np.unique(out.pixels.reshape(-1, 3), axis=0)
            assert len(distinct) <= k

    def test_render_dimension_mismatch(self):
        rng = np.random.default_rng(38)
        img = RgbImage(pixels=rng.integers(0, 256, (6, 6, 3), dtype=np.uint8))
        lm = segment_image(img, ColorSpace.HSV, KMeansParams(k=2, seed=0))
        other = RgbImage(pixels=rng.integers(0, 256, (5, 6, 3), dtype=np.uint8))
        with pytest.raises(ValueError):
            render_segmentation(other, lm)

    def test_label_map_pgm_round_trip(self, tmp_path):
        rng = np.random.default_rng(39)
        img = RgbImage(pixels=rng.integers(0, 256, (9, 7, 3), dtype=np.uint8))
        lm = segment_image(img, ColorSpace.HSV, KMeansParams(k=3, seed=0))
        path = tmp_path / "labels.pgm"
        save_label_map(lm, path)
        assert np.array_equal(read_pgm(path), lm.labels.astype(np.uint8))
