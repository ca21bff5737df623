"""Recovery error against the number of stored patterns, 2-PCM vs 64-bit.

Run with ``python3 demos/04_pattern_sweep.py``.  Takes about 15 s.
"""
import numpy as np

from pcmrbm.experiments import ExperimentConfig, run_pattern_sweep

cfg = ExperimentConfig(kind="sweep-patterns", trials=3, seed=0, n_patterns=[2, 3, 5, 8],
                       checkpoints=[10, 30, 70])
res = run_pattern_sweep(cfg)

# success is only recorded for the 2-PCM network
print("  n  synapse  epoch   error   success")
for r in res.aggregate:
    print(f"{r['n_patterns']:3d}  {r['synapse']:7s}  {r['epoch']:5d}  {r['err_rate_mean']:6.3f}  "
          + (f"{r['success_rate_mean']:7.3f}" if r["synapse"] == "2-pcm" else "      -"))

# 2-PCM error over all 70 epochs for five patterns, trial by trial
curves = []
for rows in res.trials:
    sel = sorted((r["epoch"], r["err_rate"]) for r in rows if r["n_patterns"] == 5 and r["synapse"] == "2-pcm")
    curves.append([e for _, e in sel])
curves = np.array(curves)
print("best epoch per trial (n=5):", curves.argmin(axis=1))
