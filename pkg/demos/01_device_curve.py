"""A single PCM cell under repeated partial-SET pulses.

Run with ``python3 demos/01_device_curve.py``.
"""
import numpy as np

from pcmrbm.device import DeviceParams, PcmCell, partial_set, read_energy, set_curve

params = DeviceParams()
print(params)
print("tau =", params.tau, "pulses, on/off ratio =", params.on_off_ratio)

# the noiseless SET curve, sampled every few pulses
n = np.arange(0, params.n_levels + 1, 6)
g = set_curve(n, params.g_min, params.g_max, params.n_levels)
for k, gk in zip(n, g):
    print(f"n={k:3d}  G={gk * 1e6:6.3f} uS")

# a row of 8 cells: device-to-device spread plus cycle-to-cycle noise
rng = np.random.default_rng(0)
cells = PcmCell.create(params, rng, shape=(8,))
print("g_max per device (uS):", np.round(cells.g_max_i * 1e6, 2))
trace = [cells.g.copy()]
for _ in range(20):
    partial_set(cells, params, rng)
    trace.append(cells.g.copy())
trace = np.array(trace)
print("conductance after 0, 5, 10, 20 pulses (uS):")
for i in (0, 5, 10, 20):
    print(f"  {i:2d}:", np.round(trace[i] * 1e6, 2))

# reading costs g * V^2 * t per cell
print("read energy of the row (pJ):", round(float(read_energy(cells.g, params).sum()) * 1e12, 3))
