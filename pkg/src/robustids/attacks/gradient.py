"""Sign-gradient evasion attacks: single-step, iterated, and projected.

All three maximize the classification loss inside an L-inf ball of radius
epsilon intersected with the unit box. The iterate lives in delta space so
the single-step reductions (bim/pgd with T=1, alpha=epsilon, no random
start) reproduce fgsm bit for bit.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import clip01
from ..errors import ParameterError
from .base import loss_gradient, make_batch, per_sample_ce, logits_array


def _check(cfg):
    if cfg.epsilon < 0:
        raise ParameterError(f"epsilon must be >= 0, got {cfg.epsilon}")


def fgsm(model, X, y, cfg):
    """One signed step of size epsilon along the input loss gradient."""
    _check(cfg)
    X = np.asarray(X, dtype=np.float64)
    grad, _, _ = loss_gradient(model, X, y)
    X_adv = clip01(X + cfg.epsilon * np.sign(grad))
    return make_batch(model, cfg, X, X_adv, y)


def _iterate_signed(model, X, y, cfg, delta):
    """Shared bim/pgd loop: step, clamp to the epsilon ball, box-clip."""
    alpha = cfg.alpha
    for _ in range(cfg.steps):
        grad, _, _ = loss_gradient(model, clip01(X + delta), y)
        delta = np.clip(delta + alpha * np.sign(grad), -cfg.epsilon, cfg.epsilon)
    return clip01(X + delta)


def bim(model, X, y, cfg):
    """Iterated fgsm with per-step size alpha, projected into the ball."""
    _check(cfg)
    X = np.asarray(X, dtype=np.float64)
    X_adv = _iterate_signed(model, X, y, cfg, np.zeros_like(X))
    return make_batch(model, cfg, X, X_adv, y)


def pgd(model, X, y, cfg, rng=None):
    """bim with an optional uniform random start inside the ball.

    With several restarts, each sample keeps the restart that reached the
    highest loss. Seeded via `rng` (or cfg.seed), so results are
    reproducible draw for draw.
    """
    _check(cfg)
    X = np.asarray(X, dtype=np.float64)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    best_adv = None
    best_loss = np.full(X.shape[0], -np.inf)
    for _ in range(cfg.pgd_restarts):
        if cfg.pgd_random_start:
            delta = rng.uniform(-cfg.epsilon, cfg.epsilon, size=X.shape)
            delta = clip01(X + delta) - X
        else:
            delta = np.zeros_like(X)
        X_adv = _iterate_signed(model, X, y, cfg, delta)
        losses = per_sample_ce(logits_array(model, X_adv), y)
        if best_adv is None:
            best_adv, best_loss = X_adv, losses
        else:
            better = losses > best_loss
            best_adv = np.where(better[:, None], X_adv, best_adv)
            best_loss = np.maximum(losses, best_loss)
    return make_batch(model, cfg, X, best_adv, y)
