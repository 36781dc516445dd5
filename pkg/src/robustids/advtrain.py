"""Min-max adversarial training: replace (part of) every batch with
inner-maximized versions against the current parameters, then take the
usual minimization step.

Attack randomness is keyed by (attack seed, epoch, batch index), so a
logged parameter snapshot plus the batch values reproduce any generated
adversarial batch exactly. Training randomness (shuffling, dropout) lives
on separate streams: with mix_ratio = 0 or a zero budget the trajectory is
bit-for-bit the plain training run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackConfig, inner_maximize, per_sample_ce, logits_array
from .errors import ConfigError
from .metrics import report_from_predictions
from .nn.training import TrainConfig, train_loop

_VAL_STREAM_KEY = 2**31  # distinct from any batch index


@dataclass
class AdvTrainConfig:
    train: TrainConfig
    attack: AttackConfig | None = None
    mix_ratio: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.mix_ratio <= 1.0:
            raise ConfigError(f"mix_ratio must be in [0,1], got {self.mix_ratio}")
        if self.mix_ratio > 0 and (self.attack is None or self.attack.method is None):
            raise ConfigError("attack-free training cannot have mix_ratio > 0")

    def to_dict(self):
        return {
            "train": self.train.to_dict(),
            "attack": None if self.attack is None else self.attack.to_dict(),
            "mix_ratio": self.mix_ratio,
        }


@dataclass
class EpochSnapshot:
    """Enough state to regenerate the epoch's first adversarial batch."""

    epoch: int
    theta: dict
    batch_X: np.ndarray
    batch_y: np.ndarray
    mixed_X: np.ndarray
    adv_loss_eval: float


@dataclass
class TrainingRunLog:
    """Per-epoch clean/adversarial losses and validation accuracies."""

    epochs: list = field(default_factory=list)
    attack: dict | None = None
    mix_ratio: float = 1.0
    train_config: dict = field(default_factory=dict)
    snapshots: list = field(default_factory=list)  # in-memory only

    def to_dict(self):
        return {
            "train_config": self.train_config,
            "attack": self.attack,
            "mix_ratio": self.mix_ratio,
            "epochs": self.epochs,
        }


def _attack_rng(attack, epoch, batch_index):
    return np.random.default_rng(
        np.random.SeedSequence(attack.seed, spawn_key=(epoch, batch_index))
    )


def _eval_loss(net, X, y):
    return float(per_sample_ce(logits_array(net, X), y).mean())


def robust_accuracy(net, X, y, attack, rng=None):
    """Budget-respecting accuracy under freshly generated samples."""
    was_train = net.train_mode
    net.eval()
    batch = inner_maximize(net, X, y, attack, rng=rng)
    within = batch.within_budget()
    ok = np.where(within, batch.adv_pred == y, batch.clean_pred == y)
    if was_train:
        net.train()
    return float(ok.mean()), batch


def adversarial_fit(net, train, val, cfg, keep_snapshots=False):
    """Run Algorithm-style min-max training; returns (net, TrainingRunLog)."""
    attack = cfg.attack
    mix = cfg.mix_ratio
    Xtr = np.asarray(train.X, dtype=np.float64)
    ytr = np.asarray(train.y)
    Xv = np.asarray(val.X, dtype=np.float64)
    yv = np.asarray(val.y)

    snapshots = []
    epoch_clock = [time.perf_counter()]

    def batch_transform(network, Xb, yb, epoch, b):
        attacking = attack is not None and attack.method is not None and mix > 0.0
        snap = None
        if keep_snapshots and b == 0:
            snap = EpochSnapshot(
                epoch=epoch,
                theta=network.parameter_values(),
                batch_X=Xb.copy(),
                batch_y=np.asarray(yb).copy(),
                mixed_X=Xb,
                adv_loss_eval=0.0,
            )
            snapshots.append(snap)
        if not attacking:
            if snap is not None:
                network.eval()
                snap.mixed_X = Xb.copy()
                snap.adv_loss_eval = _eval_loss(network, Xb, yb)
            return Xb
        network.eval()
        batch = inner_maximize(network, Xb, yb, attack, rng=_attack_rng(attack, epoch, b))
        count = int(round(mix * len(yb)))
        mixed = Xb.copy()
        mixed[:count] = batch.perturbed[:count]
        if snap is not None:
            snap.mixed_X = mixed.copy()
            snap.adv_loss_eval = _eval_loss(network, mixed, yb)
        return mixed

    def epoch_extra(network, epoch):
        network.eval()
        extras = {"clean_loss": _eval_loss(network, Xtr, ytr)}
        if attack is not None and attack.method is not None:
            acc, _ = robust_accuracy(
                network, Xv, yv, attack, rng=_attack_rng(attack, epoch, _VAL_STREAM_KEY)
            )
            extras["val_robust_accuracy"] = acc
        now = time.perf_counter()
        extras["seconds"] = now - epoch_clock[0]
        epoch_clock[0] = now
        return extras

    base_log = train_loop(
        net, train, val, cfg.train, batch_transform=batch_transform, epoch_extra=epoch_extra
    )
    log = TrainingRunLog(
        epochs=[
            {
                "train_loss": rec.train_loss,
                "val_accuracy": rec.val_accuracy,
                **rec.extras,
            }
            for rec in base_log.epochs
        ],
        attack=None if attack is None else attack.to_dict(),
        mix_ratio=mix,
        train_config=cfg.train.to_dict(),
        snapshots=snapshots,
    )
    return net, log


def evaluate_robustness(
    net,
    test,
    attacks,
    model_id="model",
    dataset_id="dataset",
    family="",
    phase="",
    timestamp="",
):
    """Clean metrics plus one EvalReport per attack, each generated fresh
    against the evaluated network."""
    net.eval()
    X = np.asarray(test.X, dtype=np.float64)
    y = np.asarray(test.y)
    clean_pred, clean_scores = net.predict(X)
    reports = [
        report_from_predictions(
            model_id,
            dataset_id,
            "clean",
            y,
            clean_pred,
            clean_scores,
            phase=phase,
            family=family,
            timestamp=timestamp,
        )
    ]
    for attack in attacks:
        batch = inner_maximize(
            net, X, y, attack, rng=np.random.default_rng(attack.seed)
        )
        adv_pred, adv_scores = net.predict(batch.perturbed)
        reports.append(
            report_from_predictions(
                model_id,
                dataset_id,
                attack.attack_id(),
                y,
                adv_pred,
                adv_scores,
                batch=batch,
                phase=phase,
                family=family,
                config=attack.to_dict(),
                timestamp=timestamp,
            )
        )
    return reports
