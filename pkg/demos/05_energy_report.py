"""Per-epoch energy: conventional digital hardware against the PCM array.

Run with ``python3 demos/05_energy_report.py``.
"""
from pcmrbm.energy import conventional_epoch_energy
from pcmrbm.experiments import ExperimentConfig, format_energy_report, run_energy_report

b = conventional_epoch_energy()
print("operations per epoch:", b.total_ops)
print(f"logic {b.logic_j * 1e9:.1f} nJ + memory {b.memory_j * 1e9:.1f} nJ = {b.total_j * 1e9:.1f} nJ")

for preset in ("experiment-64bit", "experiment-16bit", "pcm-1gb"):
    cfg = ExperimentConfig(kind="energy-report", trials=2, energy_preset=preset)
    print(f"\n== {preset} ==")
    print(format_energy_report(run_energy_report(cfg)))
