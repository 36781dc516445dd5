"""Network construction, training mechanics, and the sklearn wrappers."""

import math

import numpy as np
import pytest

from robustids import autodiff as ad
from robustids.autodiff import Tensor
from robustids.errors import (
    ContractError,
    DataError,
    DimensionError,
    LabelError,
    ParameterError,
    SpecError,
)
from robustids.nn import (
    AdamState,
    NetworkSpec,
    NeuralNetClassifier,
    TrainConfig,
    adam_step,
    build,
    cross_entropy,
    fit,
)

RNG = np.random.default_rng(77)


class _DS:
    def __init__(self, X, y):
        self.X = X
        self.y = y


def separable_dataset(n=400, seed=0):
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < 0.5).astype(np.int64)
    x0 = np.clip(np.where(y == 1, 0.75, 0.25) + rng.normal(0, 0.08, n), 0, 1)
    x1 = np.clip(np.where(y == 1, 0.7, 0.3) + rng.normal(0, 0.1, n), 0, 1)
    X = np.column_stack([x0, x1])
    return _DS(X, y)


class TestBuild:
    def test_ann_parameter_count_matches_layer_arithmetic(self):
        # 5*128+128 + 128*96+96 + 96*64+64 + 64*2+2
        expected = 5 * 128 + 128 + 128 * 96 + 96 + 96 * 64 + 64 + 64 * 2 + 2
        assert expected == 19490
        assert build(NetworkSpec.ann(5), seed=0).parameter_count() == expected

    def test_cnn_parameter_count_matches_layer_arithmetic(self):
        # 3 conv layers (k=3, channels 1->16->32->64, biased), flattened
        # length ceil(ceil(5/2)/2)=2, dense 128->64->48->32->16->2
        conv = (3 * 1 * 16 + 16) + (3 * 16 * 32 + 32) + (3 * 32 * 64 + 64)
        dense = (128 * 64 + 64) + (64 * 48 + 48) + (48 * 32 + 32) + (32 * 16 + 16) + (16 * 2 + 2)
        assert build(NetworkSpec.cnn(5), seed=0).parameter_count() == conv + dense

    def test_rnn_parameter_count_matches_layer_arithmetic(self):
        # two LSTM layers (W: in x 4H, U: H x 4H, b: 4H) with H=64, then
        # dense 64->32->2
        lstm1 = 1 * 256 + 64 * 256 + 256
        lstm2 = 64 * 256 + 64 * 256 + 256
        dense = 64 * 32 + 32 + 32 * 2 + 2
        assert build(NetworkSpec.rnn(5), seed=0).parameter_count() == lstm1 + lstm2 + dense

    def test_same_seed_bit_identical(self):
        a = build(NetworkSpec.ann(7), seed=42)
        b = build(NetworkSpec.ann(7), seed=42)
        for name in a.parameters:
            assert np.array_equal(a.parameters[name].data, b.parameters[name].data)

    def test_zero_weight_rnn_outputs_zero_logits(self):
        net = build(NetworkSpec.rnn(4), seed=0)
        net.set_parameter_values({k: np.zeros_like(p.data) for k, p in net.parameters.items()})
        _, logits = net.forward(RNG.random((3, 4)))
        assert np.array_equal(logits.data, np.zeros((3, 2)))

    def test_lstm_forget_bias_initialized_open(self):
        net = build(NetworkSpec.rnn(4), seed=0)
        b = net.parameters["lstm0.b"].data
        assert np.array_equal(b[64:128], np.ones(64))
        assert not b[:64].any()

    def test_cnn_valid_padding_collapse_rejected(self):
        with pytest.raises(SpecError):
            NetworkSpec.cnn(4, conv_padding="valid")

    def test_bad_dropout_rejected(self):
        with pytest.raises(SpecError):
            NetworkSpec.ann(4, dropout=1.0)


class TestForward:
    def test_zero_weight_ann_uniform_probs(self):
        net = build(NetworkSpec.ann(3), seed=0)
        net.set_parameter_values({k: np.zeros_like(p.data) for k, p in net.parameters.items()})
        probs, _ = net.forward(RNG.random((4, 3)))
        assert np.array_equal(probs.data, np.full((4, 2), 0.5))

    def test_eval_forward_deterministic(self):
        net = build(NetworkSpec.ann(6), seed=1).eval()
        X = RNG.random((5, 6))
        p1, _ = net.forward(X)
        p2, _ = net.forward(X)
        assert np.array_equal(p1.data, p2.data)

    def test_single_feature_ann_matches_hand_chain(self):
        net = build(NetworkSpec.ann(1, hidden=(2, 2, 2)), seed=0)
        x = np.array([[0.3]])
        h = x
        for i in range(3):
            W = net.parameters[f"dense{i}.w"].data
            b = net.parameters[f"dense{i}.b"].data
            h = np.maximum(h @ W + b, 0.0)
        logits = h @ net.parameters["out.w"].data + net.parameters["out.b"].data
        _, out = net.forward(x)
        assert np.abs(out.data - logits).max() < 1e-12

    def test_feature_mismatch(self):
        net = build(NetworkSpec.ann(4), seed=0)
        with pytest.raises(DimensionError):
            net.forward(RNG.random((2, 5)))

    @pytest.mark.parametrize("family", ["ann", "cnn", "rnn"])
    def test_probability_rows_sum_to_one(self, family):
        net = build(getattr(NetworkSpec, family)(5), seed=2)
        probs, _ = net.forward(RNG.random((6, 5)))
        assert np.abs(probs.data.sum(axis=1) - 1.0).max() < 1e-9


class TestLoss:
    def test_uniform_prediction(self):
        loss = cross_entropy(Tensor([[0.5, 0.5]]), np.array([0]))
        assert loss.item() == pytest.approx(math.log(2), abs=1e-12)

    def test_perfect_prediction_clamped(self):
        loss = cross_entropy(Tensor([[1.0, 0.0]]), np.array([0]))
        assert loss.item() == pytest.approx(0.0, abs=1e-12)

    def test_batch_mean_reduction(self):
        la = cross_entropy(Tensor([[0.9, 0.1]]), np.array([0])).item()
        lb = cross_entropy(Tensor([[0.2, 0.8]]), np.array([0])).item()
        both = cross_entropy(Tensor([[0.9, 0.1], [0.2, 0.8]]), np.array([0, 0])).item()
        assert both == pytest.approx((la + lb) / 2, abs=1e-12)

    def test_bad_label(self):
        with pytest.raises(LabelError):
            cross_entropy(Tensor([[0.5, 0.5]]), np.array([2]))


class TestAdam:
    def test_first_step_closed_form(self):
        p = {"w": Tensor(np.array([1.0, -2.0, 0.5]), requires_grad=True)}
        g = np.array([0.4, -0.7, 0.0])
        state = AdamState(p)
        before = p["w"].data.copy()
        adam_step(p, {"w": g}, state, lr=0.01)
        expected = before - 0.01 * g / (np.abs(g) + 1e-8)
        assert np.abs(p["w"].data - expected).max() < 1e-9

    def test_zero_gradient_no_move(self):
        p = {"w": Tensor(np.array([1.0, 2.0]), requires_grad=True)}
        state = AdamState(p)
        adam_step(p, {"w": np.zeros(2)}, state, lr=0.1)
        assert np.array_equal(p["w"].data, np.array([1.0, 2.0]))

    def test_two_steps_monotone_against_sign(self):
        p = {"w": Tensor(np.array([0.0]), requires_grad=True)}
        g = np.array([0.3])
        state = AdamState(p)
        adam_step(p, {"w": g}, state, lr=0.05)
        first = p["w"].data.copy()
        adam_step(p, {"w": g}, state, lr=0.05)
        assert first[0] < 0.0
        assert p["w"].data[0] < first[0]

    def test_shape_mismatch(self):
        p = {"w": Tensor(np.zeros((2, 2)), requires_grad=True)}
        state = AdamState(p)
        with pytest.raises(DimensionError):
            adam_step(p, {"w": np.zeros(3)}, state, lr=0.1)


class TestFit:
    def test_separable_reaches_high_accuracy(self):
        ds = separable_dataset()
        net = build(NetworkSpec.ann(2), seed=5)
        log = fit(net, ds, ds, TrainConfig(seed=5))
        assert log.epochs[-1].val_accuracy >= 0.99

    def test_epochs_zero_rejected(self):
        with pytest.raises(ParameterError):
            TrainConfig(epochs=0)

    def test_same_seed_identical_log_and_parameters(self):
        ds = separable_dataset(n=120)
        runs = []
        for _ in range(2):
            net = build(NetworkSpec.ann(2), seed=9)
            log = fit(net, ds, ds, TrainConfig(seed=9, epochs=3))
            runs.append((log, net.parameter_values()))
        log_a, params_a = runs[0]
        log_b, params_b = runs[1]
        assert [e.train_loss for e in log_a.epochs] == [e.train_loss for e in log_b.epochs]
        assert [e.val_accuracy for e in log_a.epochs] == [e.val_accuracy for e in log_b.epochs]
        for name in params_a:
            assert np.array_equal(params_a[name], params_b[name])

    def test_empty_dataset_rejected(self):
        ds = separable_dataset(n=40)
        empty = _DS(np.zeros((0, 2)), np.zeros(0, dtype=np.int64))
        net = build(NetworkSpec.ann(2), seed=0)
        with pytest.raises(DataError):
            fit(net, empty, ds, TrainConfig())

    def test_loss_decreases_on_separable_data(self):
        ds = separable_dataset()
        net = build(NetworkSpec.ann(2), seed=1)
        log = fit(net, ds, ds, TrainConfig(seed=1))
        assert log.epochs[-1].train_loss < log.epochs[0].train_loss

    @pytest.mark.parametrize("family", ["ann", "cnn", "rnn"])
    def test_loss_stays_finite(self, family):
        ds = separable_dataset(n=96)
        net = build(getattr(NetworkSpec, family)(2), seed=2)
        log = fit(net, ds, ds, TrainConfig(seed=2, epochs=10))
        assert all(np.isfinite(e.train_loss) for e in log.epochs)


class TestPredict:
    def test_argmax_and_score(self):
        net = build(NetworkSpec.ann(2), seed=0)
        probs = np.array([[0.7, 0.3]])

        labels = (probs[:, 1] > probs[:, 0]).astype(int)
        assert labels[0] == 0 and probs[0, 1] == 0.3

    def test_tie_breaks_to_benign(self):
        net = build(NetworkSpec.ann(3), seed=0)
        net.set_parameter_values({k: np.zeros_like(p.data) for k, p in net.parameters.items()})
        labels, scores = net.predict(RNG.random((4, 3)))
        assert not labels.any()  # probs are exactly [0.5, 0.5]
        assert np.array_equal(scores, np.full(4, 0.5))

    def test_batch_matches_rowwise_argmax_oracle(self):
        net = build(NetworkSpec.ann(4), seed=3)
        X = RNG.random((20, 4))
        labels, scores = net.predict(X)
        probs, _ = net.forward(X)
        expected = np.array([int(row[1] > row[0]) for row in probs.data])
        assert np.array_equal(labels, expected)

    def test_train_mode_rejected(self):
        net = build(NetworkSpec.ann(2), seed=0).train()
        with pytest.raises(ContractError):
            net.predict(RNG.random((2, 2)))


class TestDropout:
    def test_inverted_dropout_preserves_expectation(self):
        # mean over 10k stochastic passes of one dropout layer stays
        # within 2% of the eval (identity) output
        rng = np.random.default_rng(123)
        x = np.random.default_rng(77).random(64) + 0.5
        total = np.zeros_like(x)
        passes = 10_000
        for _ in range(passes):
            total += ad.dropout(Tensor(x), 0.25, rng).data
        mean = total / passes
        assert (np.abs(mean - x) / x).max() < 0.02

    def test_eval_mode_has_no_dropout_draws(self):
        net = build(NetworkSpec.ann(3), seed=0).eval()
        X = RNG.random((4, 3))
        a, _ = net.forward(X)
        b, _ = net.forward(X)
        assert np.array_equal(a.data, b.data)

    def test_train_mode_requires_rng(self):
        net = build(NetworkSpec.ann(3), seed=0).train()
        with pytest.raises(ContractError):
            net.forward(RNG.random((2, 3)))


class TestEstimators:
    def test_fit_predict_roundtrip(self):
        ds = separable_dataset(n=200)
        clf = NeuralNetClassifier(family="ann", epochs=5, seed=4)
        clf.fit(ds.X, ds.y)
        assert (clf.predict(ds.X) == ds.y).mean() >= 0.95
        proba = clf.predict_proba(ds.X)
        assert np.abs(proba.sum(axis=1) - 1.0).max() < 1e-9

    def test_get_params_round_trip(self):
        clf = NeuralNetClassifier(family="cnn", epochs=2, seed=1)
        params = clf.get_params()
        clone = NeuralNetClassifier(**params)
        assert clone.get_params() == params

    def test_bad_labels_rejected(self):
        clf = NeuralNetClassifier(epochs=1)
        with pytest.raises(LabelError):
            clf.fit(RNG.random((10, 2)), np.arange(10))
