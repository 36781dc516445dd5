from .base import (
    AdversarialBatch,
    AttackConfig,
    METHODS,
    logits_array,
    loss_gradient,
    make_batch,
    per_sample_ce,
    predict_labels,
)
from .carlini import cw_l2
from .deepfool import deepfool
from .dispatch import inner_maximize
from .gradient import bim, fgsm, pgd

__all__ = [
    "AdversarialBatch",
    "AttackConfig",
    "METHODS",
    "logits_array",
    "loss_gradient",
    "make_batch",
    "per_sample_ce",
    "predict_labels",
    "bim",
    "cw_l2",
    "deepfool",
    "fgsm",
    "inner_maximize",
    "pgd",
]
