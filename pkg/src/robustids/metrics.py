"""Binary evaluation suite: confusion counts, rates, ROC-AUC, and the
per-run report record. Positive class = attack = 1 throughout."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MetricError, ParameterError

UNDEFINED_RATE = 0.0  # reported value when a rate's denominator is zero


@dataclass
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ParameterError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if not (np.isin(pred, (0, 1)).all() and np.isin(truth, (0, 1)).all()):
        raise ParameterError("labels must be binary 0/1")
    return ConfusionCounts(
        tp=int(((pred == 1) & (truth == 1)).sum()),
        fp=int(((pred == 1) & (truth == 0)).sum()),
        tn=int(((pred == 0) & (truth == 0)).sum()),
        fn=int(((pred == 0) & (truth == 1)).sum()),
    )


@dataclass
class Rates:
    accuracy: float
    precision: float
    recall: float
    specificity: float
    undefined: tuple = ()  # names of rates whose denominator was zero


def rates(c):
    if c.total == 0:
        raise ParameterError("cannot compute rates over zero samples")
    undefined = []

    def guarded(num, den, name):
        if den == 0:
            undefined.append(name)
            return UNDEFINED_RATE
        return num / den

    out = Rates(
        accuracy=(c.tp + c.tn) / c.total,
        precision=guarded(c.tp, c.tp + c.fp, "precision"),
        recall=guarded(c.tp, c.tp + c.fn, "recall"),
        specificity=guarded(c.tn, c.tn + c.fp, "specificity"),
    )
    out.undefined = tuple(undefined)
    return out


def roc_auc(scores, labels):
    """Area under the ROC curve via average ranks (ties get 0.5 credit),
    identical to the normalized pair-counting statistic."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise ParameterError(f"length mismatch: {scores.shape} vs {labels.shape}")
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise MetricError("roc_auc needs both classes present")

    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass
class EvalReport:
    """One model/dataset/attack evaluation cell.

    `accuracy` (and friends) describe predictions on the evaluated inputs
    as-is. `robust_accuracy` additionally holds over-budget perturbations
    against the attacker: a sample whose perturbation exceeds the
    configured budget keeps its clean prediction. The two coincide for the
    hard-budget attacks.
    """

    model_id: str
    dataset_id: str
    attack_id: str  # "clean" for the unattacked evaluation
    counts: ConfusionCounts
    accuracy: float
    precision: float
    recall: float
    specificity: float
    auc: float
    mean_linf: float = 0.0
    mean_l2: float = 0.0
    robust_accuracy: float | None = None
    attack_subset: dict | None = None
    undefined: tuple = ()
    phase: str = ""
    family: str = ""
    timestamp: str = ""
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "model_id": self.model_id,
            "dataset_id": self.dataset_id,
            "attack_id": self.attack_id,
            "phase": self.phase,
            "family": self.family,
            "counts": self.counts.to_dict(),
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "specificity": self.specificity,
            "auc": self.auc,
            "mean_linf": self.mean_linf,
            "mean_l2": self.mean_l2,
            "robust_accuracy": self.robust_accuracy,
            "attack_subset": self.attack_subset,
            "undefined": list(self.undefined),
            "timestamp": self.timestamp,
            "config": self.config,
        }

    def flat_row(self):
        """One aggregation-friendly CSV row (timestamps excluded)."""
        row = {
            "dataset_id": self.dataset_id,
            "family": self.family,
            "attack_id": self.attack_id,
            "phase": self.phase,
            "model_id": self.model_id,
            "tp": self.counts.tp,
            "fp": self.counts.fp,
            "tn": self.counts.tn,
            "fn": self.counts.fn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "specificity": self.specificity,
            "auc": self.auc,
            "mean_linf": self.mean_linf,
            "mean_l2": self.mean_l2,
            "robust_accuracy": "" if self.robust_accuracy is None else self.robust_accuracy,
        }
        if self.attack_subset:
            row["attack_subset_robust_accuracy"] = self.attack_subset.get(
                "robust_accuracy", ""
            )
        else:
            row["attack_subset_robust_accuracy"] = ""
        return row


FLAT_COLUMNS = [
    "dataset_id",
    "family",
    "attack_id",
    "phase",
    "model_id",
    "tp",
    "fp",
    "tn",
    "fn",
    "accuracy",
    "precision",
    "recall",
    "specificity",
    "auc",
    "mean_linf",
    "mean_l2",
    "robust_accuracy",
    "attack_subset_robust_accuracy",
]


def report_from_predictions(
    model_id,
    dataset_id,
    attack_id,
    y,
    pred,
    scores,
    batch=None,
    phase="",
    family="",
    config=None,
    timestamp="",
):
    """Assemble an EvalReport from predictions (and an attack batch, if any)."""
    y = np.asarray(y)
    c = confusion(pred, y)
    r = rates(c)
    report = EvalReport(
        model_id=model_id,
        dataset_id=dataset_id,
        attack_id=attack_id,
        counts=c,
        accuracy=r.accuracy,
        precision=r.precision,
        recall=r.recall,
        specificity=r.specificity,
        auc=roc_auc(scores, y),
        undefined=r.undefined,
        phase=phase,
        family=family,
        timestamp=timestamp,
        config=dict(config or {}),
    )
    if batch is not None:
        report.mean_linf = float(batch.linf.mean())
        report.mean_l2 = float(batch.l2.mean())
        within = batch.within_budget()
        clean_ok = batch.clean_pred == y
        adv_ok = np.asarray(pred) == y
        report.robust_accuracy = float(np.where(within, adv_ok, clean_ok).mean())
        attack_rows = y == 1
        if attack_rows.any():
            # accuracy when only true-attack rows are perturbed
            mixed_ok = np.where(attack_rows, adv_ok, clean_ok)
            report.attack_subset = {
                "n": int(attack_rows.sum()),
                "adv_accuracy": float(adv_ok[attack_rows].mean()),
                "robust_accuracy": float(
                    np.where(within, adv_ok, clean_ok)[attack_rows].mean()
                ),
                "perturb_attack_only_accuracy": float(mixed_ok.mean()),
            }
    return report
