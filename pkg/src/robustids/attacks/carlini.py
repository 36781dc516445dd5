"""Minimum-L2 margin attack with a tanh change of variables.

Minimizes ||delta||^2 + c * max(Z_y - Z_other, -kappa) by plain gradient
descent in tanh space, which keeps every iterate inside the unit box. Each
sample keeps its smallest successful perturbation; samples the search
never misclassifies come back flagged unsuccessful.
"""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..errors import ParameterError
from .base import make_batch

_ATANH_SHRINK = 1.0 - 1e-6  # keeps atanh finite at the box corners


def cw_l2(model, X, y, cfg):
    if cfg.cw_c <= 0:
        raise ParameterError(f"cw_c must be > 0, got {cfg.cw_c}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    rows = np.arange(n)

    w = Tensor(np.arctanh((2.0 * X - 1.0) * _ATANH_SHRINK), requires_grad=True)
    x_const = Tensor(X)

    best_adv = X.copy()
    best_l2sq = np.full(n, np.inf)
    last_adv = X.copy()

    for _ in range(cfg.steps):
        x_adv = ad.scale(ad.add_scalar(ad.tanh(w), 1.0), 0.5)
        delta = ad.sub(x_adv, x_const)
        z = model.logits(x_adv)
        margin = ad.sub(ad.pick(z, y), ad.pick(z, 1 - y))
        objective = ad.add(
            ad.tsum(ad.mul(delta, delta)),
            ad.scale(ad.tsum(ad.clamp_min(margin, -cfg.cw_kappa)), cfg.cw_c),
        )
        w.zero_grad()
        ad.backward(objective)

        last_adv = x_adv.data.copy()
        pred = (z.data[:, 1] > z.data[:, 0]).astype(np.int64)
        l2sq = (delta.data * delta.data).sum(axis=1)
        better = (pred != y) & (l2sq < best_l2sq)
        if better.any():
            best_adv[better] = last_adv[better]
            best_l2sq[better] = l2sq[better]

        w.data = w.data - cfg.cw_lr * w.grad

    succeeded = np.isfinite(best_l2sq)
    final = np.where(succeeded[:, None], best_adv, last_adv)
    notes = {int(i): "no misclassifying iterate found" for i in rows[~succeeded]}
    return make_batch(model, cfg, X, final, y, notes=notes)
