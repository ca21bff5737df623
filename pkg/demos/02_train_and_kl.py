"""Train the 9x5 RBM on bars-and-stripes and watch KL and recovery error.

Run with ``python3 demos/02_train_and_kl.py``.
"""
import numpy as np

from pcmrbm.experiments import ExperimentConfig, run_training_experiment

cfg = ExperimentConfig(trials=3, seed=0, n_patterns=5, ais_every=5).with_overrides(["train.epochs=30"])
res = run_training_experiment(cfg)

# aggregate rows carry <metric>_mean and <metric>_std over trials
print(" epoch  KL exact   KL AIS  error  64-bit error")
for r in res.aggregate:
    if r["epoch"] % 5 == 0:
        print(f"{r['epoch']:6d}  {r['kl_exact_nats_mean']:8.3f}  {r['kl_ais_nats_mean']:7.3f}  "
              f"{r['err_rate_mean']:5.3f}  {r['baseline_err_rate_mean']:12.3f}")

# per-trial curves are available too
kl = np.array([[row["kl_exact_nats"] for row in rows] for rows in res.trials])
print("best epoch per trial:", kl.argmin(axis=1))

# the trained weights of trial 0
rec_w = np.array([[row["mean_w"], row["min_w"], row["max_w"]] for row in res.trials[0]])
print("weight mean/min/max at epoch 30:", np.round(rec_w[-1], 3))
