"""Single entry point that routes a batch to the configured attack."""

from __future__ import annotations

from ..errors import ParameterError
from .base import passthrough_batch
from .carlini import cw_l2
from .deepfool import deepfool
from .gradient import bim, fgsm, pgd


def inner_maximize(model, X, y, cfg, rng=None):
    """Generate adversarial versions of a batch under `cfg`.

    The attack-free configuration (method None) returns the batch
    unchanged, which is the no-op branch of the adversarial training loop.
    """
    if cfg.method is None:
        return passthrough_batch(model, cfg, X, y)
    if cfg.method == "fgsm":
        return fgsm(model, X, y, cfg)
    if cfg.method == "bim":
        return bim(model, X, y, cfg)
    if cfg.method == "pgd":
        return pgd(model, X, y, cfg, rng=rng)
    if cfg.method == "cw":
        return cw_l2(model, X, y, cfg)
    if cfg.method == "deepfool":
        return deepfool(model, X, cfg, y=y, rng=rng)
    raise ParameterError(f"unknown attack method {cfg.method!r}")
