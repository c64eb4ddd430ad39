import numpy as np
import pytest

from mvufs.datamodel import (
    DatasetError,
    MultiViewDataset,
    SyntheticSpec,
    build_view_weights,
    generate_synthetic,
    impute_missing,
    load_dataset,
    save_dataset,
    simulate_missing,
)


def small_dataset(n=10, l=3, seed=0):
    rng = np.random.default_rng(seed)
    views = tuple(rng.uniform(size=(4 + v, n)) for v in range(l))
    return MultiViewDataset(views, np.ones((n, l), dtype=int))


class TestInvariants:
    def test_negative_entry_rejected(self):
        x = np.ones((3, 4))
        x[1, 2] = -0.5
        with pytest.raises(DatasetError, match="negative"):
            MultiViewDataset((x,), np.ones((4, 1), dtype=int))

    def test_mismatched_instance_counts_rejected(self):
        with pytest.raises(DatasetError, match="instances"):
            MultiViewDataset(
                (np.ones((3, 4)), np.ones((2, 5))), np.ones((4, 2), dtype=int)
            )

    def test_instance_in_zero_views_rejected(self):
        presence = np.ones((4, 2), dtype=int)
        presence[1] = 0
        with pytest.raises(DatasetError, match="zero views"):
            MultiViewDataset((np.ones((3, 4)), np.ones((2, 4))), presence)


class TestViewWeights:
    def test_complete_view_all_ones(self):
        w = build_view_weights(small_dataset())
        for vec in w.vectors:
            assert np.all(vec == 1.0)

    def test_partial_view_gets_presence_fraction(self):
        ds = small_dataset(n=10)
        presence = np.ones((10, 3), dtype=int)
        presence[:3, 0] = 0  # 7 of 10 present in view 0
        ds = MultiViewDataset(ds.views, presence)
        w = build_view_weights(ds)
        assert np.allclose(w.vectors[0][:3], 0.7)
        assert np.all(w.vectors[0][3:] == 1.0)

    def test_single_present_instance(self):
        ds = small_dataset(n=10)
        presence = np.ones((10, 3), dtype=int)
        presence[1:, 0] = 0
        ds = MultiViewDataset(ds.views, presence)
        w = build_view_weights(ds)
        assert np.allclose(w.vectors[0][1:], 0.1)

    def test_only_two_weight_values_after_simulation(self):
        ds = simulate_missing(small_dataset(n=20), 0.3, seed=5)
        w = build_view_weights(ds)
        for v, vec in enumerate(w.vectors):
            frac = ds.presence[:, v].mean()
            assert np.all((vec == 1.0) | (vec == frac))


class TestSimulateMissing:
    def test_ratio_zero_is_identity(self):
        ds = small_dataset()
        assert simulate_missing(ds, 0.0, seed=1) is ds

    def test_exact_absent_count_per_view(self):
        ds = simulate_missing(small_dataset(n=10, l=3), 0.3, seed=2)
        assert np.all((ds.presence == 0).sum(axis=0) == 3)

    def test_deterministic(self):
        a = simulate_missing(small_dataset(n=30), 0.4, seed=9)
        b = simulate_missing(small_dataset(n=30), 0.4, seed=9)
        assert np.array_equal(a.presence, b.presence)

    def test_every_instance_kept_somewhere(self):
        for seed in range(10):
            ds = simulate_missing(small_dataset(n=12, l=3), 0.5, seed=seed)
            assert np.all(ds.presence.sum(axis=1) >= 1)

    def test_incomplete_input_rejected(self):
        ds = simulate_missing(small_dataset(), 0.3, seed=0)
        with pytest.raises(DatasetError, match="complete"):
            simulate_missing(ds, 0.3, seed=1)


class TestImpute:
    def test_complete_view_unchanged(self):
        ds = small_dataset()
        out = impute_missing(ds)
        for x, y in zip(ds.views, out):
            assert np.array_equal(x, y)

    def test_mean_fill(self):
        x = np.array([[1.0, 3.0, 99.0]])
        full = np.ones((2, 3))
        presence = np.array([[1, 1], [1, 1], [0, 1]])
        ds = MultiViewDataset((x, full), presence)
        out = impute_missing(ds)
        assert out[0][0, 2] == pytest.approx(2.0)

    def test_zero_feature_stays_zero(self):
        x = np.array([[0.0, 0.0, 5.0]])
        full = np.ones((2, 3))
        presence = np.array([[1, 1], [1, 1], [0, 1]])
        out = impute_missing(MultiViewDataset((x, full), presence))
        assert out[0][0, 2] == 0.0
        assert np.all(out[0] >= 0)

    def test_idempotent_on_complete(self):
        ds = small_dataset()
        once = impute_missing(ds)
        twice = impute_missing(MultiViewDataset(tuple(once), ds.presence))
        for a, b in zip(once, twice):
            assert np.array_equal(a, b)


class TestSynthetic:
    def test_zero_noise_cluster_constancy(self):
        spec = SyntheticSpec(20, 2, 2, (6, 6), (3, 3), noise_scale=0.0, seed=4)
        ds, planted = generate_synthetic(spec)
        for v in range(2):
            for k in range(2):
                cols = ds.views[v][np.ix_(planted[v], ds.labels == k)]
                assert np.allclose(cols, cols[:, :1])

    def test_all_features_informative_boundary(self):
        spec = SyntheticSpec(12, 2, 3, (5, 5), (5, 5), seed=1)
        _, planted = generate_synthetic(spec)
        for idx in planted:
            assert np.array_equal(idx, np.arange(5))

    def test_deterministic(self):
        spec = SyntheticSpec(15, 3, 3, (4, 5, 6), (2, 2, 2), seed=7)
        a, pa = generate_synthetic(spec)
        b, pb = generate_synthetic(spec)
        for x, y in zip(a.views, b.views):
            assert np.array_equal(x, y)
        assert np.array_equal(a.labels, b.labels)
        for i, j in zip(pa, pb):
            assert np.array_equal(i, j)


class TestIO:
    def test_round_trip(self, tmp_path):
        spec = SyntheticSpec(9, 3, 2, (3, 4, 5), (1, 1, 1), seed=2)
        ds, _ = generate_synthetic(spec)
        ds = simulate_missing(ds, 0.2, seed=0)
        save_dataset(ds, str(tmp_path))
        back = load_dataset(str(tmp_path))
        assert back.n_views == 3
        assert np.array_equal(back.presence, ds.presence)
        assert np.array_equal(back.labels, ds.labels)
        for x, y in zip(ds.views, back.views):
            assert np.allclose(x, y)

    def test_negative_entry_in_file(self, tmp_path):
        (tmp_path / "manifest.txt").write_text("views 1\nview v.txt 1 2\n")
        (tmp_path / "v.txt").write_text("1.0 -0.5\n")
        with pytest.raises(DatasetError, match="negative"):
            load_dataset(str(tmp_path))

    def test_manifest_is_authoritative(self, tmp_path):
        ds = small_dataset(n=6, l=2)
        save_dataset(ds, str(tmp_path))
        # an extra matrix file in the directory must be ignored
        (tmp_path / "view_9.txt").write_text("1 2 3 4 5 6\n")
        back = load_dataset(str(tmp_path))
        assert back.n_views == 2

    def test_declared_shape_mismatch(self, tmp_path):
        (tmp_path / "manifest.txt").write_text("views 1\nview v.txt 2 3\n")
        (tmp_path / "v.txt").write_text("1 2 3\n")
        with pytest.raises(DatasetError, match="shape"):
            load_dataset(str(tmp_path))

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DatasetError, match="manifest"):
            load_dataset(str(tmp_path))
