"""Cross-entropy loss, Adam, and the seeded mini-batch training loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..errors import DataError, DimensionError, LabelError, ParameterError

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 10
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ParameterError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ParameterError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ParameterError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.seed < 0:
            raise ParameterError(f"seed must be non-negative, got {self.seed}")

    def to_dict(self):
        return {
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
        }


class AdamState:
    """Per-parameter first/second moments plus the shared step counter."""

    def __init__(self, parameters):
        self.m = {k: np.zeros_like(p.data) for k, p in parameters.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in parameters.items()}
        self.t = 0


def adam_step(parameters, grads, state, lr):
    """One Adam update, in place. `grads` maps parameter name to array."""
    state.t += 1
    t = state.t
    for name, p in parameters.items():
        g = grads.get(name)
        if g is None:
            continue
        if g.shape != p.data.shape:
            raise DimensionError(
                f"gradient for {name} has shape {g.shape}, parameter {p.data.shape}"
            )
        m = state.m[name] = ADAM_BETA1 * state.m[name] + (1 - ADAM_BETA1) * g
        v = state.v[name] = ADAM_BETA2 * state.v[name] + (1 - ADAM_BETA2) * g * g
        m_hat = m / (1 - ADAM_BETA1**t)
        v_hat = v / (1 - ADAM_BETA2**t)
        p.data = p.data - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    return parameters, state


def cross_entropy(probs, labels):
    """Mean negative log-probability of the true class, clamped at 1e-12."""
    labels = np.asarray(labels)
    if not np.isin(labels, (0, 1)).all():
        raise LabelError("labels must be 0 or 1")
    if probs.data.ndim != 2 or probs.data.shape[0] != len(labels):
        raise DimensionError(
            f"probs shape {probs.data.shape} does not match {len(labels)} labels"
        )
    p_true = ad.pick(probs, labels.astype(np.intp))
    return ad.neg(ad.tmean(ad.log(ad.clamp_min(p_true, 1e-12))))


@dataclass
class EpochRecord:
    train_loss: float
    val_accuracy: float
    extras: dict = field(default_factory=dict)


@dataclass
class TrainingLog:
    """Per-epoch loss/accuracy trace of one training run."""

    epochs: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "config": self.config,
            "epochs": [
                {"train_loss": e.train_loss, "val_accuracy": e.val_accuracy, **e.extras}
                for e in self.epochs
            ],
        }


def _as_xy(dataset):
    X = np.asarray(dataset.X, dtype=np.float64)
    y = np.asarray(dataset.y)
    if X.shape[0] == 0:
        raise DataError("dataset is empty")
    return X, y


def training_streams(seed):
    """Independent RNG streams: (data shuffling, dropout). Keeping them
    separate lets attack-side randomness vary without touching training."""
    root = np.random.SeedSequence(seed)
    return (
        np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,))),
        np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,))),
    )


def train_loop(net, train, val, cfg, batch_transform=None, epoch_extra=None):
    """Seeded epochs of shuffle/forward/loss/backward/Adam.

    `batch_transform(net, Xb, yb, epoch, batch_index) -> Xb` may replace
    batch contents before the gradient step (adversarial training hook).
    `epoch_extra(net, epoch) -> dict` appends fields to each epoch record.
    """
    X, y = _as_xy(train)
    Xv, yv = _as_xy(val)
    if X.shape[1] != Xv.shape[1]:
        raise DataError(
            f"train and val feature widths differ: {X.shape[1]} vs {Xv.shape[1]}"
        )
    rng_data, rng_drop = training_streams(cfg.seed)
    state = AdamState(net.parameters)
    log = TrainingLog(config=cfg.to_dict())

    for epoch in range(cfg.epochs):
        order = rng_data.permutation(X.shape[0])
        batch_losses = []
        for b, start in enumerate(range(0, len(order), cfg.batch_size)):
            idx = order[start : start + cfg.batch_size]
            Xb, yb = X[idx], y[idx]
            if batch_transform is not None:
                Xb = batch_transform(net, Xb, yb, epoch, b)
            net.train()
            probs, _ = net.forward(Tensor(Xb), rng=rng_drop)
            loss = cross_entropy(probs, yb)
            net.zero_grad()
            ad.backward(loss)
            grads = {k: p.grad for k, p in net.parameters.items() if p.grad is not None}
            adam_step(net.parameters, grads, state, cfg.learning_rate)
            batch_losses.append(loss.item())
        net.eval()
        pred, _ = net.predict(Xv)
        record = EpochRecord(
            train_loss=float(np.mean(batch_losses)),
            val_accuracy=float(np.mean(pred == yv)),
        )
        if epoch_extra is not None:
            record.extras = epoch_extra(net, epoch)
        log.epochs.append(record)
    net.eval()
    return log


def fit(net, train, val, cfg):
    """Plain (adversary-free) training; deterministic for a fixed seed."""
    return train_loop(net, train, val, cfg)
