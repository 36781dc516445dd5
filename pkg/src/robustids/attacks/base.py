"""Attack configuration, the adversarial batch record, and shared helpers.

Attacks treat the model as a frozen white-box scoring function: anything
with a `logits(Tensor) -> Tensor` method works, from a linear toy to a
trained network in eval mode.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor, clip01
from ..errors import ParameterError
from ..nn.training import cross_entropy

METHODS = ("fgsm", "bim", "pgd", "cw", "deepfool")
DEFAULT_ITERATIONS = {"fgsm": 1, "bim": 10, "pgd": 10, "cw": 100, "deepfool": 50}


@dataclass
class AttackConfig:
    """Knobs for one evasion method.

    `epsilon` is the perturbation budget in scaled-feature units; `norm`
    names which norm that budget constrains (hard for fgsm/bim/pgd, an
    accounting threshold for the minimum-distortion methods cw/deepfool).
    `method=None` (or "none") is the attack-free pass-through.
    """

    method: str | None = "fgsm"
    epsilon: float = 0.1
    step_size: float | None = None      # default: epsilon/10
    iterations: int | None = None       # default: per-method table
    pgd_random_start: bool = True
    pgd_restarts: int = 1
    cw_c: float = 1.0
    cw_kappa: float = 0.0
    cw_lr: float = 0.01
    deepfool_overshoot: float = 0.02
    norm: str = "linf"
    seed: int = 0

    def __post_init__(self):
        if self.method == "none":
            self.method = None
        if self.method is not None and self.method not in METHODS:
            raise ParameterError(f"unknown attack method {self.method!r}")
        if self.epsilon < 0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.step_size is not None and self.step_size <= 0:
            raise ParameterError(f"step_size must be > 0, got {self.step_size}")
        if self.iterations is not None and self.iterations < 1:
            raise ParameterError(f"iterations must be >= 1, got {self.iterations}")
        if self.pgd_restarts < 1:
            raise ParameterError(f"pgd_restarts must be >= 1, got {self.pgd_restarts}")
        if self.deepfool_overshoot < 0:
            raise ParameterError(
                f"deepfool_overshoot must be >= 0, got {self.deepfool_overshoot}"
            )
        if self.norm not in ("linf", "l2"):
            raise ParameterError(f"norm must be 'linf' or 'l2', got {self.norm!r}")

    @property
    def alpha(self):
        return self.epsilon / 10.0 if self.step_size is None else self.step_size

    @property
    def steps(self):
        if self.iterations is not None:
            return self.iterations
        return DEFAULT_ITERATIONS.get(self.method, 1)

    def attack_id(self):
        return "none" if self.method is None else f"{self.method}_eps{self.epsilon:g}"

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class AdversarialBatch:
    """Originals, perturbed versions, and per-sample bookkeeping.

    `success` means the model mislabels the perturbed sample: for the
    label-aware attacks that is `adv_pred != labels`; for the label-free
    deepfool it is a flipped model decision (`adv_pred != clean_pred`).
    """

    original: np.ndarray
    perturbed: np.ndarray
    labels: np.ndarray
    clean_pred: np.ndarray
    adv_pred: np.ndarray
    success: np.ndarray
    linf: np.ndarray
    l2: np.ndarray
    config: AttackConfig
    notes: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.original.shape[0]

    def validate(self, atol=1e-9):
        """Raise if the box or (for hard-budget methods) ball is violated."""
        if self.perturbed.min() < -atol or self.perturbed.max() > 1 + atol:
            raise ParameterError("perturbed samples left the unit box")
        if self.config.method in ("fgsm", "bim", "pgd"):
            if (self.linf > self.config.epsilon + atol).any():
                raise ParameterError("perturbation exceeded the L-inf budget")
        return self

    def budget_norms(self):
        return self.linf if self.config.norm == "linf" else self.l2

    def within_budget(self, atol=1e-9):
        """Samples whose perturbation respects the configured budget."""
        return self.budget_norms() <= self.config.epsilon + atol

    def to_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        d = self.original.shape[1]
        header = (
            [f"orig_f{j}" for j in range(d)]
            + [f"adv_f{j}" for j in range(d)]
            + ["label", "success", "linf", "l2"]
        )
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i in range(self.n):
                row = [repr(float(v)) for v in self.original[i]]
                row += [repr(float(v)) for v in self.perturbed[i]]
                row += [
                    int(self.labels[i]),
                    int(self.success[i]),
                    repr(float(self.linf[i])),
                    repr(float(self.l2[i])),
                ]
                writer.writerow(row)


def logits_array(model, X):
    return model.logits(Tensor(np.asarray(X, dtype=np.float64))).data


def predict_labels(model, X):
    z = logits_array(model, X)
    return (z[:, 1] > z[:, 0]).astype(np.int64)


def per_sample_ce(logits, y):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=1, keepdims=True)
    p_true = p[np.arange(len(y)), np.asarray(y, dtype=np.intp)]
    return -np.log(np.maximum(p_true, 1e-12))


def loss_gradient(model, X, y):
    """Input-gradient of the mean cross-entropy at X.

    Returns (grad wrt X, per-sample losses, logits array).
    """
    leaf = Tensor(np.asarray(X, dtype=np.float64), requires_grad=True)
    z = model.logits(leaf)
    loss = cross_entropy(ad.softmax(z), y)
    ad.backward(loss)
    return leaf.grad, per_sample_ce(z.data, y), z.data


def make_batch(model, cfg, X, X_adv, y, clean_pred=None, notes=None, label_free=False):
    X = np.asarray(X, dtype=np.float64)
    X_adv = np.asarray(X_adv, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if clean_pred is None:
        clean_pred = predict_labels(model, X)
    adv_pred = predict_labels(model, X_adv)
    delta = X_adv - X
    success = (adv_pred != clean_pred) if label_free else (adv_pred != y)
    return AdversarialBatch(
        original=X,
        perturbed=X_adv,
        labels=y,
        clean_pred=clean_pred,
        adv_pred=adv_pred,
        success=success,
        linf=np.abs(delta).max(axis=1) if delta.size else np.zeros(len(y)),
        l2=np.sqrt((delta * delta).sum(axis=1)),
        config=cfg,
        notes=dict(notes or {}),
    )


def passthrough_batch(model, cfg, X, y):
    """Attack-free mode: the batch comes back untouched."""
    X = np.asarray(X, dtype=np.float64)
    return make_batch(model, cfg, X, X.copy(), y)
