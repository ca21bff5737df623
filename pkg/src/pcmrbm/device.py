"""Behavioral model of a single phase-change memory cell.

A cell is RESET to a low conductance and then driven upward by partial-SET
pulses along a saturating-exponential curve.  Conductance never decreases
except through a RESET.  Two sources of nonideality are modeled:

* device-to-device spread of the curve endpoints (lognormal), and
* cycle-to-cycle spread of each pulse's increment (lognormal, mean-preserving).

All functions broadcast, so a :class:`PcmCell` can hold a single device
(float fields) or a whole bank of devices (array fields).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any

import numpy as np


@dataclass(frozen=True)
class DeviceParams:
    g_min: float = 1e-6
    g_max: float = 10e-6
    n_levels: int = 42
    sigma_c2c: float = 0.3
    sigma_d2d: float = 0.5
    e_partial_set: float = 72e-12
    e_reset: float = 100e-12
    v_read: float = 0.1
    t_read: float = 50e-6

    def __post_init__(self):
        if not (self.g_max > self.g_min > 0):
            raise ValueError(f"need g_max > g_min > 0, got g_min={self.g_min}, g_max={self.g_max}")
        if self.n_levels < 1:
            raise ValueError(f"n_levels must be >= 1, got {self.n_levels}")
        if self.sigma_c2c < 0 or self.sigma_d2d < 0:
            raise ValueError("noise sigmas must be non-negative")
        for name in ("e_partial_set", "e_reset", "v_read", "t_read"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def tau(self) -> float:
        """Pulse-count time constant of the SET curve (3 tau = n_levels)."""
        return self.n_levels / 3.0

    @property
    def on_off_ratio(self) -> float:
        return self.g_max / self.g_min

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DeviceParams":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise KeyError(f"unknown device parameter(s): {sorted(unknown)}")
        return cls(**d)


@dataclass
class PcmCell:
    """State of one device, or of a bank of devices when fields are arrays."""

    g: Any
    pulses_applied: Any
    g_min_i: Any
    g_max_i: Any

    @classmethod
    def create(cls, params: DeviceParams, rng: np.random.Generator, shape=(), ledger=None) -> "PcmCell":
        """Build a fresh device (or bank), sample its SET ceiling and RESET it."""
        g_max_i = _lognormal(params.g_max, params.sigma_d2d, rng, shape)
        cell = cls(
            g=np.zeros(shape) if shape else 0.0,
            pulses_applied=np.zeros(shape, dtype=np.int64) if shape else 0,
            g_min_i=np.zeros(shape) if shape else 0.0,
            g_max_i=g_max_i,
        )
        return reset(cell, params, rng, ledger=ledger)

    @property
    def shape(self):
        return np.shape(self.g)

    def copy(self) -> "PcmCell":
        return PcmCell(*(np.copy(getattr(self, f.name)) if np.ndim(getattr(self, f.name)) else getattr(self, f.name)
                         for f in fields(self)))


def _lognormal(median, sigma, rng, shape):
    if sigma == 0:
        return np.full(shape, float(median)) if shape else float(median)
    z = rng.standard_normal(shape)
    out = median * np.exp(sigma * z)
    return out if shape else float(out)


def set_curve(n, g_min_i, g_max_i, n_levels):
    """Noiseless conductance after ``n`` partial-SET pulses from RESET."""
    tau = n_levels / 3.0
    return g_min_i + (g_max_i - g_min_i) * -np.expm1(-np.asarray(n, dtype=float) / tau)


def reset(cell: PcmCell, params: DeviceParams, rng: np.random.Generator, ledger=None) -> PcmCell:
    """RESET the cell(s): resample the low-conductance state and zero the pulse count.

    The SET ceiling ``g_max_i`` belongs to the device and is not resampled.
    """
    shape = cell.shape
    g_min_i = _lognormal(params.g_min, params.sigma_d2d, rng, shape)
    # a device whose sampled floor lands above its ceiling is clipped to it
    g_min_i = np.minimum(g_min_i, cell.g_max_i)
    if not shape:
        g_min_i = float(g_min_i)
    cell.g_min_i = g_min_i
    cell.g = np.copy(g_min_i) if shape else g_min_i
    cell.pulses_applied = np.zeros(shape, dtype=np.int64) if shape else 0
    if ledger is not None:
        ledger.add_programming(params.e_reset, count=int(np.prod(shape)) if shape else 1)
    return cell


def partial_set(cell: PcmCell, params: DeviceParams, rng: np.random.Generator, where=None, ledger=None) -> PcmCell:
    """Apply one partial-SET pulse to the cell (or to the masked cells of a bank).

    The nominal increment is the step of the noiseless SET curve at the
    cell's current pulse count.  It is scaled by ``exp(sigma_c2c*z - sigma_c2c**2/2)``
    so the expected increment equals the nominal one.  The result is clamped
    to the device ceiling; a saturated device still consumes the pulse.
    """
    shape = cell.shape
    if where is None:
        mask = np.ones(shape, dtype=bool)
    else:
        mask = np.broadcast_to(np.asarray(where, dtype=bool), shape)
    n_pulses = int(np.count_nonzero(mask))
    if n_pulses == 0:
        return cell

    g = np.asarray(cell.g, dtype=float)
    n = np.asarray(cell.pulses_applied)
    gmin = np.asarray(cell.g_min_i, dtype=float)
    gmax = np.asarray(cell.g_max_i, dtype=float)

    g_now = g[mask] if shape else g
    n_now = n[mask] if shape else n
    lo = gmin[mask] if shape else gmin
    hi = gmax[mask] if shape else gmax

    step = set_curve(n_now + 1, lo, hi, params.n_levels) - set_curve(n_now, lo, hi, params.n_levels)
    if params.sigma_c2c > 0:
        s = params.sigma_c2c
        z = rng.standard_normal(np.shape(step))
        step = step * np.exp(s * z - 0.5 * s * s)
    new_g = np.minimum(g_now + np.maximum(step, 0.0), hi)

    if shape:
        g = g.copy()
        n = n.copy()
        g[mask] = new_g
        n[mask] = n_now + 1
        cell.g, cell.pulses_applied = g, n
    else:
        cell.g, cell.pulses_applied = float(new_g), int(n_now) + 1
    if ledger is not None:
        ledger.add_programming(params.e_partial_set, count=n_pulses)
    return cell


def read_current(cell: PcmCell, params: DeviceParams):
    """Read current in amperes at the configured read voltage (Ohm's law)."""
    return np.asarray(cell.g) * params.v_read if np.ndim(cell.g) else cell.g * params.v_read


def read_energy(g, params: DeviceParams):
    """Energy of one read of conductance(s) ``g``: g * v_read**2 * t_read."""
    return g * params.v_read ** 2 * params.t_read
