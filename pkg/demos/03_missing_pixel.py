"""Fill in masked pixels with a trained network.

Run with ``python3 demos/03_missing_pixel.py``.
"""
from pcmrbm.analysis import infer_missing_pixels, recovery_success_rate
from pcmrbm.datasets import pattern_from_str, pattern_to_str
from pcmrbm.experiments import ExperimentConfig, run_trial, trial_seed_sequence
from pcmrbm.rbm import RbmModel

cfg = ExperimentConfig(n_patterns=3, baseline=False, record_conductance=False)
rec = run_trial(cfg, 3, 30, trial_seed_sequence(cfg.seed, 0), with_ais=False)
model = RbmModel(rec.array).snapshot()
stored = rec.dataset.distinct()
print("success rate over all single-pixel masks:", round(recovery_success_rate(model, stored), 3))

# hide the centre pixel of each stored pattern
mask = pattern_from_str("000010000")
for target in stored:
    result = infer_missing_pixels(model, target, mask)
    print(f"{pattern_to_str(target)} -> {result.to_dict()['observed']}  "
          f"P(centre=1)={result.p_white[0]:.3f}  true={target[4]}  MAP={result.map_assignment[0]}")

# two missing pixels give a joint posterior over four completions
result = infer_missing_pixels(model, stored[1], pattern_from_str("100010000"))
for entry in result.to_dict()["posterior"]:
    print(entry)
