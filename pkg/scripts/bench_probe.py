"""Targeted cell probes on the interleaved benchmark."""

import sys
import time

import numpy as np

sys.path.insert(0, "src")

from robustids.data import synth_generate, prepare_splits
from robustids.nn import NetworkSpec, TrainConfig, build, fit
from robustids.attacks import AttackConfig
from robustids.advtrain import AdvTrainConfig, adversarial_fit, evaluate_robustness

D_A, GAP_A, SIG_A = 12, 0.10, 0.15
D_B, GAP_B, SIG_B = 6, 0.40, 0.12


def interleaved(n=1500, seed=11):
    sep, sig = [], []
    b_left, a_left = D_B, D_A
    stride = max(1, (D_A + D_B) // max(D_B, 1))
    for i in range(D_A + D_B):
        if b_left and i % stride == stride - 1:
            sep.append(GAP_B / SIG_B); sig.append(SIG_B); b_left -= 1
        elif a_left:
            sep.append(GAP_A / SIG_A); sig.append(SIG_A); a_left -= 1
        else:
            sep.append(GAP_B / SIG_B); sig.append(SIG_B); b_left -= 1
    raw = synth_generate(n, D_A + D_B, 1, seed=seed, separation=sep, sigma=sig)
    splits, _ = prepare_splits(raw, (0.72, 0.08, 0.2), seed=5)
    return splits["train"], splits["val"], splits["test"]


def cell(family, attack, mix, tr, va, te, seed=3, label=""):
    t0 = time.time()
    d = tr.n_features
    net = build(getattr(NetworkSpec, family)(d), seed=seed)
    fit(net, tr, va, TrainConfig(seed=seed))
    rep = evaluate_robustness(net, te, [attack], model_id="b", dataset_id="s")
    clean, base_raw, base_rob = rep[0].accuracy, rep[1].accuracy, rep[1].robust_accuracy
    net2 = build(getattr(NetworkSpec, family)(d), seed=seed)
    net2, _ = adversarial_fit(
        net2, tr, va, AdvTrainConfig(train=TrainConfig(seed=seed), attack=attack, mix_ratio=mix)
    )
    hrep = evaluate_robustness(net2, te, [attack], model_id="h", dataset_id="s")
    hard_rob, hclean = hrep[1].robust_accuracy, hrep[0].accuracy
    print(
        f"{label:34s} {family}-{attack.method:8s} mix={mix} "
        f"drop={clean-base_raw:+.3f} base_rob={base_rob:.3f} hard_rob={hard_rob:.3f} "
        f"gain={hard_rob-base_rob:+.3f} cdeg={clean-hclean:+.3f} "
        f"meanL2(base)={rep[1].mean_l2:.2f} ({time.time()-t0:.0f}s)"
    )


if __name__ == "__main__":
    tr, va, te = interleaved()
    which = sys.argv[1] if len(sys.argv) > 1 else "all"
    if which in ("all", "bim"):
        atk = AttackConfig(method="bim", epsilon=0.1, step_size=0.02, iterations=7, seed=8)
        cell("cnn", atk, 1.0, tr, va, te, label="bim mix1")
    if which in ("all", "cw"):
        for kappa, c, lr, T in [(0.0, 2.0, 0.02, 50), (2.0, 2.0, 0.02, 50), (4.0, 5.0, 0.02, 40)]:
            atk = AttackConfig(method="cw", epsilon=0.45, norm="l2", cw_c=c, cw_lr=lr,
                               cw_kappa=kappa, iterations=T, seed=10)
            cell("ann", atk, 0.5, tr, va, te, label=f"cw k={kappa} c={c} lr={lr} T={T}")
    if which in ("all", "df"):
        for eta in (0.02, 0.2):
            atk = AttackConfig(method="deepfool", epsilon=0.45, norm="l2",
                               iterations=20, deepfool_overshoot=eta, seed=11)
            cell("ann", atk, 0.5, tr, va, te, label=f"df eta={eta}")
    if which in ("all", "rnn"):
        atk = AttackConfig(method="pgd", epsilon=0.1, step_size=0.025, iterations=10, seed=9)
        cell("rnn", atk, 1.0, tr, va, te, label="rnn pgd mix1")
