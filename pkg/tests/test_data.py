"""Loaders, encoding, scaling, splitting, selection, and synthetic data."""

import numpy as np
import pytest
from sklearn.linear_model import LogisticRegression

from robustids.data import (
    EncoderMap,
    NSLKDD_FEATURES,
    PcaModel,
    ProcessedDataset,
    apply_encoder,
    apply_scaler,
    encode,
    fit_encoder,
    fit_scaler,
    load_csv,
    partition_sizes,
    pca_fit,
    pca_inverse,
    pca_transform,
    prepare_splits,
    rfe,
    scale_fit_apply,
    split,
    synth_generate,
    write_csv,
)
from robustids.data.loaders import RawDataset
from robustids.errors import DataError, ParameterError, ParseError


class _DS:
    def __init__(self, X, y):
        self.X = X
        self.y = y


def tiny_raw(n=12, seed=0):
    rng = np.random.default_rng(seed)
    return RawDataset(
        feature_names=["a", "b", "proto"],
        kinds={"a": "numeric", "b": "numeric", "proto": "categorical"},
        columns={
            "a": rng.random(n),
            "b": rng.random(n),
            "proto": np.array(rng.choice(["tcp", "udp", "icmp"], size=n), dtype=object),
        },
        y=np.tile([0, 1], n // 2).astype(np.int64),
    )


class TestLoadCsv:
    def test_generic_smoke(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text("f1,f2,label\n0.5,tcp,normal\n0.7,udp,attack\n0.2,tcp,attack\n")
        raw = load_csv(path, "generic")
        assert raw.n == 3
        assert raw.kinds == {"f1": "numeric", "f2": "categorical"}
        assert raw.y.tolist() == [0, 1, 1]

    def test_nslkdd_fixture(self, tmp_path):
        row = ["0", "tcp", "http", "SF"] + ["0.1"] * 37
        lines = [",".join(row + ["normal", "21"]), ",".join(row + ["neptune", "18"])]
        path = tmp_path / "kdd.csv"
        path.write_text("\n".join(lines) + "\n")
        raw = load_csv(path, "nslkdd")
        assert raw.n == 2
        assert raw.feature_names == NSLKDD_FEATURES
        assert raw.y.tolist() == [0, 1]
        assert raw.kinds["protocol_type"] == "categorical"

    def test_unsw_fixture_drops_id_and_attack_cat(self, tmp_path):
        path = tmp_path / "unsw.csv"
        path.write_text(
            "id,dur,proto,service,attack_cat,label\n"
            "1,0.5,tcp,http,Normal,0\n"
            "2,0.9,udp,dns,Fuzzers,1\n"
        )
        raw = load_csv(path, "unsw")
        assert raw.feature_names == ["dur", "proto", "service"]
        assert raw.y.tolist() == [0, 1]

    def test_arity_mismatch_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f1,f2,label\n1,2,normal\n1,attack\n")
        with pytest.raises(ParseError) as err:
            load_csv(path, "generic")
        assert err.value.line == 3

    def test_unknown_schema(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,label\n1,0\n")
        with pytest.raises(ParameterError):
            load_csv(path, "kdd99")

    def test_nslkdd_bad_numeric_reports_line(self, tmp_path):
        row = ["zero", "tcp", "http", "SF"] + ["0.1"] * 37 + ["normal", "21"]
        path = tmp_path / "kdd.csv"
        path.write_text(",".join(row) + "\n")
        with pytest.raises(ParseError) as err:
            load_csv(path, "nslkdd")
        assert err.value.line == 1


class TestEncoder:
    def test_lexicographic_codes(self):
        raw = tiny_raw()
        raw.columns["proto"] = np.array(["tcp", "udp", "icmp"] * 4, dtype=object)
        _, enc = encode(raw)
        assert enc.mapping["proto"] == {"icmp": 0, "tcp": 1, "udp": 2}

    def test_unseen_value_gets_reserved_code(self):
        raw = tiny_raw()
        raw.columns["proto"] = np.array(["tcp", "udp", "icmp"] * 4, dtype=object)
        enc = fit_encoder(raw)
        test = tiny_raw(seed=1)
        test.columns["proto"] = np.array(["sctp"] * 12, dtype=object)
        encoded = apply_encoder(test, enc)
        assert set(encoded.columns["proto"]) == {3.0}

    def test_single_value_column_all_zero(self):
        raw = tiny_raw()
        raw.columns["proto"] = np.array(["tcp"] * 12, dtype=object)
        encoded, enc = encode(raw)
        assert not encoded.columns["proto"].any()
        assert enc.unseen_code("proto") == 1

    def test_bijection_on_training_categories(self):
        raw = tiny_raw()
        enc = fit_encoder(raw)
        codes = list(enc.mapping["proto"].values())
        assert sorted(codes) == list(range(len(codes)))

    def test_round_trip_dict(self):
        raw = tiny_raw()
        enc = fit_encoder(raw)
        clone = EncoderMap.from_dict(enc.to_dict())
        assert clone.mapping == enc.mapping


class TestScaler:
    def test_affine_map(self):
        X = np.array([[2.0], [4.0], [6.0]])
        scaled, params = scale_fit_apply(X)
        assert scaled.reshape(-1).tolist() == [0.0, 0.5, 1.0]

    def test_constant_column_goes_to_zero(self):
        X = np.array([[7.0], [7.0]])
        scaled, _ = scale_fit_apply(X)
        assert scaled.reshape(-1).tolist() == [0.0, 0.0]

    def test_test_values_clip(self):
        train = np.array([[2.0], [6.0]])
        params = fit_scaler(train)
        assert apply_scaler(np.array([[10.0]]), params).item() == 1.0

    def test_idempotent_on_scaled_train(self):
        rng = np.random.default_rng(3)
        X = rng.random((50, 4)) * 10 - 3
        scaled, _ = scale_fit_apply(X)
        rescaled, _ = scale_fit_apply(scaled)
        assert np.abs(rescaled - scaled).max() < 1e-12


class TestSplit:
    def test_published_counts_arithmetic(self):
        assert partition_sizes(125_973, (0.8, 0.2)) == [100_778, 25_195]
        assert partition_sizes(175_341, (0.67, 0.33)) == [117_478, 57_863]

    def test_fractions_must_sum_to_one(self):
        with pytest.raises(ParameterError):
            partition_sizes(100, (0.5, 0.4))

    def test_empty_partition_rejected(self):
        with pytest.raises(ParameterError):
            partition_sizes(100, (1.0, 0.0, 0.0))

    def test_same_seed_identical(self):
        raw = tiny_raw(n=40)
        a = split(raw, (0.5, 0.5), seed=3)
        b = split(raw, (0.5, 0.5), seed=3)
        for pa, pb in zip(a, b):
            assert np.array_equal(pa.columns["a"], pb.columns["a"])
            assert np.array_equal(pa.y, pb.y)

    def test_stratification_within_two_points(self):
        rng = np.random.default_rng(8)
        n = 2000
        raw = RawDataset(
            feature_names=["v"],
            kinds={"v": "numeric"},
            columns={"v": rng.random(n)},
            y=(rng.random(n) < 0.31).astype(np.int64),
        )
        overall = raw.y.mean()
        for part in split(raw, (0.7, 0.1, 0.2), seed=1):
            assert abs(part.y.mean() - overall) < 0.02

    def test_sizes_exact(self):
        raw = tiny_raw(n=40)
        parts = split(raw, (0.72, 0.08, 0.2), seed=0)
        assert [p.n for p in parts] == [28, 3, 9]


class TestRfe:
    def test_synthetic_informative_feature_wins(self):
        rng = np.random.default_rng(5)
        n = 300
        X = rng.random((n, 5))
        y = (X[:, 0] > 0.5).astype(np.int64)
        assert rfe(_DS(X, y), 1) == [0]

    def test_k_equals_d_identity_selection(self):
        rng = np.random.default_rng(6)
        X = rng.random((50, 4))
        y = (X[:, 1] > 0.5).astype(np.int64)
        assert sorted(rfe(_DS(X, y), 4)) == [0, 1, 2, 3]

    def test_k_bounds(self):
        rng = np.random.default_rng(7)
        ds = _DS(rng.random((20, 3)), np.tile([0, 1], 10))
        with pytest.raises(ParameterError):
            rfe(ds, 0)
        with pytest.raises(ParameterError):
            rfe(ds, 4)

    def test_chain_subset_property(self):
        rng = np.random.default_rng(9)
        n = 200
        X = rng.random((n, 6))
        y = ((X[:, 0] + 0.5 * X[:, 3]) > 0.75).astype(np.int64)
        ds = _DS(X, y)
        for k in range(1, 6):
            assert set(rfe(ds, k)) <= set(rfe(ds, k + 1))


class TestPca:
    def test_collinear_data(self):
        t = np.linspace(0, 1, 30)
        X = np.column_stack([t, t])
        model = pca_fit(X, 1)
        assert np.abs(model.components[0] - 1 / np.sqrt(2)).max() < 1e-8
        assert model.explained_variance_ratio[0] == pytest.approx(1.0, abs=1e-12)

    def test_full_rank_round_trip(self):
        rng = np.random.default_rng(11)
        X = rng.random((60, 5))
        model = pca_fit(X, 5)
        recon = pca_inverse(model, pca_transform(model, X))
        assert np.abs(recon - X).max() < 1e-8

    def test_orthonormal_components(self):
        rng = np.random.default_rng(12)
        X = rng.random((80, 6))
        model = pca_fit(X, 4)
        gram = model.components @ model.components.T
        assert np.abs(gram - np.eye(4)).max() < 1e-8

    def test_variance_fractions_sorted_and_bounded(self):
        rng = np.random.default_rng(13)
        X = rng.random((100, 5)) * np.array([5, 3, 1, 0.5, 0.1])
        model = pca_fit(X, 5)
        r = model.explained_variance_ratio
        assert (np.diff(r) <= 1e-12).all()
        assert r.sum() <= 1 + 1e-9

    def test_projections_decorrelated(self):
        rng = np.random.default_rng(14)
        X = rng.random((200, 4)) @ rng.random((4, 4))
        model = pca_fit(X, 3)
        proj = (X - model.mean) @ model.components.T
        cov = np.cov(proj, rowvar=False)
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() < 1e-8

    def test_outputs_rescaled_to_unit_interval(self):
        rng = np.random.default_rng(15)
        X = rng.random((50, 4))
        model = pca_fit(X, 2)
        out = pca_transform(model, X)
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_k_bounds(self):
        rng = np.random.default_rng(16)
        with pytest.raises(ParameterError):
            pca_fit(rng.random((10, 3)), 4)


class TestSynthetic:
    def test_high_separation_linearly_learnable(self):
        raw = synth_generate(600, 3, 2, seed=4, separation=3.0)
        encoded, _ = encode(raw)
        X = encoded.numeric_matrix()
        clf = LogisticRegression(max_iter=500).fit(X, raw.y)
        assert clf.score(X, raw.y) >= 0.95

    def test_zero_separation_unlearnable(self):
        raw = synth_generate(2000, 3, 2, seed=4, separation=0.0)
        encoded, _ = encode(raw)
        X = encoded.numeric_matrix()
        clf = LogisticRegression(max_iter=500).fit(X, raw.y)
        assert abs(clf.score(X, raw.y) - 0.5) < 0.05

    def test_same_seed_identical_bytes(self, tmp_path):
        for i in (0, 1):
            write_csv(synth_generate(100, 2, 1, seed=9), tmp_path / f"s{i}.csv")
        assert (tmp_path / "s0.csv").read_bytes() == (tmp_path / "s1.csv").read_bytes()

    def test_minimum_size(self):
        with pytest.raises(ParameterError):
            synth_generate(5, 2, 1, seed=0)

    def test_per_feature_separation_lists(self):
        raw = synth_generate(100, 2, 0, seed=1, separation=[5.0, 0.0], sigma=[0.05, 0.1])
        x0 = raw.columns["x0"]
        gap = x0[raw.y == 1].mean() - x0[raw.y == 0].mean()
        assert gap > 0.2


class TestProcessedDataset:
    def test_immutable(self):
        ds = ProcessedDataset(
            X=np.array([[0.1, 0.2]]), y=np.array([1]), feature_names=("a", "b")
        )
        with pytest.raises(ValueError):
            ds.X[0, 0] = 5.0

    def test_rejects_out_of_range(self):
        with pytest.raises(DataError):
            ProcessedDataset(X=np.array([[1.5]]), y=np.array([0]), feature_names=("a",))

    def test_prepare_splits_pipeline(self):
        raw = synth_generate(400, 3, 1, seed=2)
        processed, prov = prepare_splits(raw, (0.72, 0.08, 0.2), seed=7)
        assert set(processed) == {"train", "val", "test"}
        assert prov["partition_rows"] == [288, 32, 80]
        for ds in processed.values():
            assert ds.X.min() >= 0.0 and ds.X.max() <= 1.0

    def test_prepare_splits_with_rfe(self):
        raw = synth_generate(400, 3, 3, seed=3)
        processed, prov = prepare_splits(
            raw, (0.72, 0.08, 0.2), seed=7, selection={"method": "rfe", "k": 2}
        )
        assert processed["train"].n_features == 2
        assert len(prov["selection"]["indices"]) == 2

    def test_prepare_splits_with_pca(self):
        raw = synth_generate(400, 3, 3, seed=3)
        processed, prov = prepare_splits(
            raw, (0.72, 0.08, 0.2), seed=7, selection={"method": "pca", "k": 3}
        )
        assert processed["test"].n_features == 3
        assert processed["test"].feature_names == ("pc0", "pc1", "pc2")
