"""Iterative linearization attack for the binary margin g(x) = Z_1 - Z_0.

Each step moves a sample by -(g / ||grad g||^2) * grad g, the exact
distance to the decision boundary of the linearized model, until the sign
of g flips or the iteration budget runs out. The summed steps get a small
overshoot and a final box clip. Label-free: it works off the model's own
decision, not the true labels.
"""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor, clip01
from .base import make_batch, predict_labels


def _margin_and_grad(model, X_rows):
    leaf = Tensor(X_rows, requires_grad=True)
    z = model.logits(leaf)
    n = X_rows.shape[0]
    margin = ad.sub(ad.pick(z, np.ones(n, dtype=np.intp)), ad.pick(z, np.zeros(n, dtype=np.intp)))
    ad.backward(ad.tsum(margin))
    return margin.data.copy(), leaf.grad


def deepfool(model, X, cfg, y=None, rng=None):
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    clean_pred = predict_labels(model, X)
    if y is None:
        y = clean_pred  # label-free attack; true labels are bookkeeping only

    g0, _ = _margin_and_grad(model, X)
    orig_sign = np.sign(g0)
    r_tot = np.zeros_like(X)
    # samples starting on the boundary (g == 0) never iterate
    active = orig_sign != 0.0
    notes = {}

    for _ in range(cfg.steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        g, grad = _margin_and_grad(model, X[idx] + r_tot[idx])

        flipped = np.sign(g) != orig_sign[idx]  # includes exact boundary hits
        active[idx[flipped]] = False
        live = ~flipped
        if not live.any():
            break

        grad_sq = (grad[live] * grad[live]).sum(axis=1)
        # numerically-zero gradients (incl. subnormals) would overflow the
        # step; report them as singular instead
        singular = grad_sq < 1e-200
        for j in idx[live][singular]:
            notes[int(j)] = "zero margin gradient with nonzero margin"
            active[j] = False
        ok = ~singular
        move_rows = idx[live][ok]
        coeff = -(g[live][ok] / grad_sq[ok])
        r_tot[move_rows] += coeff[:, None] * grad[live][ok]

    X_adv = clip01(X + (1.0 + cfg.deepfool_overshoot) * r_tot)
    return make_batch(
        model, cfg, X, X_adv, y, clean_pred=clean_pred, notes=notes, label_free=True
    )
