"""Min-max training: degenerate equivalences, snapshot regeneration, and
the hardening property on a single desk-scale cell."""

import numpy as np
import pytest

from robustids.advtrain import (
    AdvTrainConfig,
    adversarial_fit,
    evaluate_robustness,
    robust_accuracy,
)
from robustids.attacks import AttackConfig, inner_maximize, logits_array, per_sample_ce
from robustids.errors import ConfigError
from robustids.nn import NetworkSpec, TrainConfig, build, fit


class _DS:
    def __init__(self, X, y):
        self.X = X
        self.y = y


def vulnerable_dataset(n=700, seed=2):
    """One near-budget shortcut feature plus two wide-gap features."""
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < 0.5).astype(np.int64)
    cols = []
    for gap, sigma in [(0.12, 0.02), (0.12, 0.15), (0.12, 0.15), (0.12, 0.15),
                       (0.4, 0.12), (0.4, 0.12)]:
        centers = np.where(y == 1, 0.5 + gap / 2, 0.5 - gap / 2)
        cols.append(np.clip(centers + rng.normal(0, sigma, n), 0, 1))
    X = np.column_stack(cols)
    return _DS(X[: int(n * 0.8)], y[: int(n * 0.8)]), _DS(X[int(n * 0.8):], y[int(n * 0.8):])


def _epoch_core(log):
    return [(e["train_loss"], e["val_accuracy"]) for e in log.epochs]


class TestDegenerateEquivalence:
    def test_mix_zero_reproduces_plain_fit_bit_for_bit(self):
        train, val = vulnerable_dataset()
        cfg = TrainConfig(seed=11, epochs=4)
        plain = build(NetworkSpec.ann(6), seed=11)
        plain_log = fit(plain, train, val, cfg)

        adv = build(NetworkSpec.ann(6), seed=11)
        attack = AttackConfig(method="pgd", epsilon=0.1, step_size=0.02, iterations=3, seed=5)
        adv, adv_log = adversarial_fit(
            adv, train, val, AdvTrainConfig(train=cfg, attack=attack, mix_ratio=0.0)
        )
        assert _epoch_core(adv_log) == [
            (e.train_loss, e.val_accuracy) for e in plain_log.epochs
        ]
        for name in plain.parameters:
            assert np.array_equal(plain.parameters[name].data, adv.parameters[name].data)

    def test_zero_epsilon_reproduces_plain_fit_bit_for_bit(self):
        train, val = vulnerable_dataset()
        cfg = TrainConfig(seed=13, epochs=4)
        plain = build(NetworkSpec.ann(6), seed=13)
        plain_log = fit(plain, train, val, cfg)

        adv = build(NetworkSpec.ann(6), seed=13)
        attack = AttackConfig(method="pgd", epsilon=0.0, iterations=3, seed=5)
        adv, adv_log = adversarial_fit(
            adv, train, val, AdvTrainConfig(train=cfg, attack=attack, mix_ratio=1.0)
        )
        assert _epoch_core(adv_log) == [
            (e.train_loss, e.val_accuracy) for e in plain_log.epochs
        ]
        for name in plain.parameters:
            assert np.array_equal(plain.parameters[name].data, adv.parameters[name].data)

    def test_attack_free_with_positive_mix_rejected(self):
        with pytest.raises(ConfigError):
            AdvTrainConfig(train=TrainConfig(), attack=AttackConfig(method=None), mix_ratio=0.5)

    def test_mix_ratio_bounds(self):
        with pytest.raises(ConfigError):
            AdvTrainConfig(train=TrainConfig(), attack=AttackConfig(), mix_ratio=1.5)


class TestSnapshots:
    def test_epoch_snapshots_regenerate_logged_adversarial_loss(self):
        train, val = vulnerable_dataset()
        cfg = TrainConfig(seed=21, epochs=3)
        attack = AttackConfig(method="pgd", epsilon=0.1, step_size=0.03, iterations=4, seed=9)
        net = build(NetworkSpec.ann(6), seed=21)
        net, log = adversarial_fit(
            net,
            train,
            val,
            AdvTrainConfig(train=cfg, attack=attack, mix_ratio=1.0),
            keep_snapshots=True,
        )
        assert len(log.snapshots) == 3
        for snap in log.snapshots:
            replay = build(NetworkSpec.ann(6), seed=21)
            replay.set_parameter_values(snap.theta)
            replay.eval()
            rng = np.random.default_rng(
                np.random.SeedSequence(attack.seed, spawn_key=(snap.epoch, 0))
            )
            batch = inner_maximize(replay, snap.batch_X, snap.batch_y, attack, rng=rng)
            mixed = snap.batch_X.copy()
            mixed[: len(mixed)] = batch.perturbed
            assert np.array_equal(mixed, snap.mixed_X)
            loss = per_sample_ce(logits_array(replay, mixed), snap.batch_y).mean()
            assert loss == snap.adv_loss_eval


class TestHardening:
    def test_pgd_cell_gains_fifteen_points(self, benchmark_splits):
        train = benchmark_splits["train"]
        val = benchmark_splits["val"]
        d = train.n_features
        cfg = TrainConfig(seed=3)
        attack = AttackConfig(method="pgd", epsilon=0.1, step_size=0.025, iterations=10, seed=17)

        baseline = build(NetworkSpec.ann(d), seed=3)
        fit(baseline, train, val, cfg)
        base_rob, _ = robust_accuracy(baseline, val.X, val.y, attack)

        hardened = build(NetworkSpec.ann(d), seed=3)
        hardened, log = adversarial_fit(
            hardened, train, val, AdvTrainConfig(train=cfg, attack=attack, mix_ratio=1.0)
        )
        hard_rob, _ = robust_accuracy(hardened, val.X, val.y, attack)
        assert hard_rob >= base_rob + 0.15
        # the trailing log entry is the same measurement on fresh samples
        assert log.epochs[-1]["val_robust_accuracy"] >= base_rob + 0.15

    def test_training_attack_tracks_current_parameters(self):
        # adversarial loss in epoch k is computed against epoch-k weights,
        # so successive clean losses should still fall (model keeps fitting)
        train, val = vulnerable_dataset(n=500, seed=6)
        cfg = TrainConfig(seed=41, epochs=5)
        attack = AttackConfig(method="fgsm", epsilon=0.08, seed=3)
        net = build(NetworkSpec.ann(6), seed=41)
        net, log = adversarial_fit(
            net, train, val, AdvTrainConfig(train=cfg, attack=attack, mix_ratio=0.5)
        )
        clean_losses = [e["clean_loss"] for e in log.epochs]
        assert clean_losses[-1] < clean_losses[0]


class TestEvaluateRobustness:
    def test_empty_attack_list_gives_clean_only(self):
        train, val = vulnerable_dataset(n=300, seed=8)
        net = build(NetworkSpec.ann(6), seed=1)
        fit(net, train, val, TrainConfig(seed=1, epochs=2))
        reports = evaluate_robustness(net, val, [], model_id="m", dataset_id="d")
        assert len(reports) == 1
        assert reports[0].attack_id == "clean"

    def test_same_seed_identical_reports(self):
        train, val = vulnerable_dataset(n=300, seed=9)
        net = build(NetworkSpec.ann(6), seed=2)
        fit(net, train, val, TrainConfig(seed=2, epochs=2))
        attack = AttackConfig(method="pgd", epsilon=0.1, step_size=0.02, iterations=3, seed=77)
        a = evaluate_robustness(net, val, [attack], model_id="m", dataset_id="d")
        b = evaluate_robustness(net, val, [attack], model_id="m", dataset_id="d")
        assert a[1].to_dict() == b[1].to_dict()

    def test_reports_carry_attack_subset_block(self):
        train, val = vulnerable_dataset(n=300, seed=10)
        net = build(NetworkSpec.ann(6), seed=3)
        fit(net, train, val, TrainConfig(seed=3, epochs=2))
        attack = AttackConfig(method="fgsm", epsilon=0.1, seed=5)
        reports = evaluate_robustness(net, val, [attack], model_id="m", dataset_id="d")
        subset = reports[1].attack_subset
        assert subset is not None
        assert subset["n"] == int((val.y == 1).sum())
        assert 0.0 <= subset["perturb_attack_only_accuracy"] <= 1.0
