"""Offline benchmark tuning: run (family x attack) hardening cells on a
candidate synthetic configuration and print criterion margins."""

import sys
import time

import numpy as np

sys.path.insert(0, "src")

from robustids.data import synth_generate, prepare_splits
from robustids.nn import NetworkSpec, TrainConfig, build, fit
from robustids.attacks import AttackConfig
from robustids.advtrain import AdvTrainConfig, adversarial_fit, evaluate_robustness


def attack_suite(d, seed0=7, cw_c=2.0, cw_lr=0.02, cw_T=50, df_T=20, df_eta=0.5):
    l2_eps = round(0.1 * np.sqrt(d), 2)
    return [
        AttackConfig(method="fgsm", epsilon=0.1, seed=seed0),
        AttackConfig(method="bim", epsilon=0.1, step_size=0.02, iterations=7, seed=seed0 + 1),
        AttackConfig(method="pgd", epsilon=0.1, step_size=0.025, iterations=10, seed=seed0 + 2),
        AttackConfig(method="cw", epsilon=l2_eps, norm="l2", cw_c=cw_c, cw_lr=cw_lr,
                     iterations=cw_T, seed=seed0 + 3),
        AttackConfig(method="deepfool", epsilon=l2_eps, norm="l2", iterations=df_T,
                     deepfool_overshoot=df_eta, seed=seed0 + 4),
    ]


def run(name, d_A, gap_A, sig_A, d_B, gap_B, sig_B, n=1500, families=("ann", "cnn"),
        mix=0.5, seed=3, interleave=True, **suite_kw):
    if interleave:
        # spread the strong-gap features among the weak ones so convolution
        # windows cannot isolate a contiguous robust block
        sep, sig = [], []
        b_left, a_left = d_B, d_A
        stride = max(1, (d_A + d_B) // max(d_B, 1))
        for i in range(d_A + d_B):
            if b_left and i % stride == stride - 1:
                sep.append(gap_B / sig_B); sig.append(sig_B); b_left -= 1
            elif a_left:
                sep.append(gap_A / sig_A); sig.append(sig_A); a_left -= 1
            else:
                sep.append(gap_B / sig_B); sig.append(sig_B); b_left -= 1
    else:
        sep = [gap_A / sig_A] * d_A + [gap_B / sig_B] * d_B
        sig = [sig_A] * d_A + [sig_B] * d_B
    raw = synth_generate(n, d_A + d_B, 1, seed=11, separation=sep, sigma=sig)
    splits, _ = prepare_splits(raw, (0.72, 0.08, 0.2), seed=5)
    tr, va, te = splits["train"], splits["val"], splits["test"]
    d = tr.n_features
    atks = attack_suite(d, **suite_kw)
    print(f"== {name}: {d} features, n={n}, mix={mix}")
    worstocean = []
    for family in families:
        t0 = time.time()
        net = build(getattr(NetworkSpec, family)(d), seed=seed)
        fit(net, tr, va, TrainConfig(seed=seed))
        rep = evaluate_robustness(net, te, atks, model_id="b", dataset_id="s")
        clean = rep[0].accuracy
        base_raw = {r.attack_id.split("_")[0]: r.accuracy for r in rep[1:]}
        base_rob = {r.attack_id.split("_")[0]: r.robust_accuracy for r in rep[1:]}
        print(f"  {family}: clean={clean:.3f} (baseline fit {time.time()-t0:.0f}s)")
        for atk in atks:
            t1 = time.time()
            m = atk.method
            net2 = build(getattr(NetworkSpec, family)(d), seed=seed)
            net2, _ = adversarial_fit(
                net2, tr, va,
                AdvTrainConfig(train=TrainConfig(seed=seed), attack=atk, mix_ratio=mix),
            )
            hrep = evaluate_robustness(net2, te, [atk], model_id="h", dataset_id="s")
            drop = clean - base_raw[m]
            gain = hrep[1].robust_accuracy - base_rob[m]
            cdeg = clean - hrep[0].accuracy
            flag = "OK " if (drop >= 0.20 and gain >= 0.15 and cdeg <= 0.10) else "BAD"
            print(
                f"    {flag} {m:9s} raw_drop={drop:+.3f} base_rob={base_rob[m]:.3f} "
                f"hard_rob={hrep[1].robust_accuracy:.3f} gain={gain:+.3f} "
                f"clean_deg={cdeg:+.3f} ({time.time()-t1:.0f}s)"
            )


if __name__ == "__main__":
    run("T2 interleaved 12A(.10/.15)+6B(.40/.12)", 12, 0.10, 0.15, 6, 0.40, 0.12)
