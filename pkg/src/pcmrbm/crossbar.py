"""Differential 2-PCM synapse array.

Each synapse is a pair of cells (G+, G-).  The dimensionless weight is

    w_ij = ((G+_ij - G-_ij) - M) / S

where M and S are the mean and standard deviation of ``G+ - G-`` over the
array right after initialization.  They are frozen from then on.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .device import DeviceParams, PcmCell, partial_set, read_energy


class ZeroSpread(ValueError):
    """Initial G+ - G- has zero spread; an explicit S override is required."""


@dataclass
class SynapseArray:
    params: DeviceParams
    plus: PcmCell
    minus: PcmCell
    m_norm: float
    s_norm: float
    wire_energy_per_read: float = 0.0

    @property
    def n_visible(self) -> int:
        return self.plus.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.plus.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.plus.shape

    def weights(self) -> np.ndarray:
        return weights(self)

    def weight_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-synapse weight range reachable without a RESET."""
        lo = ((self.plus.g_min_i - self.minus.g_max_i) - self.m_norm) / self.s_norm
        hi = ((self.plus.g_max_i - self.minus.g_min_i) - self.m_norm) / self.s_norm
        return lo, hi

    def snapshot(self) -> dict:
        """JSON-ready state: conductances, pulse counts and the frozen normalization."""
        def bank(c: PcmCell):
            return {
                "g": np.asarray(c.g).tolist(),
                "pulses_applied": np.asarray(c.pulses_applied).tolist(),
                "g_min_i": np.asarray(c.g_min_i).tolist(),
                "g_max_i": np.asarray(c.g_max_i).tolist(),
            }

        return {
            "n_visible": self.n_visible,
            "n_hidden": self.n_hidden,
            "m_norm": self.m_norm,
            "s_norm": self.s_norm,
            "wire_energy_per_read": self.wire_energy_per_read,
            "device": self.params.to_dict(),
            "plus": bank(self.plus),
            "minus": bank(self.minus),
        }

    @classmethod
    def from_snapshot(cls, d: dict) -> "SynapseArray":
        def bank(b):
            return PcmCell(
                g=np.array(b["g"], dtype=float),
                pulses_applied=np.array(b["pulses_applied"], dtype=np.int64),
                g_min_i=np.array(b["g_min_i"], dtype=float),
                g_max_i=np.array(b["g_max_i"], dtype=float),
            )

        return cls(
            params=DeviceParams.from_dict(d["device"]),
            plus=bank(d["plus"]),
            minus=bank(d["minus"]),
            m_norm=float(d["m_norm"]),
            s_norm=float(d["s_norm"]),
            wire_energy_per_read=float(d.get("wire_energy_per_read", 0.0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.snapshot())

    def copy(self) -> "SynapseArray":
        return SynapseArray(self.params, self.plus.copy(), self.minus.copy(), self.m_norm, self.s_norm,
                            self.wire_energy_per_read)

    # hardware reads, see module-level functions
    def read_preactivation(self, v, ledger=None) -> np.ndarray:
        return read_preactivation(self, v, ledger)

    def read_reconstruction(self, h, ledger=None) -> np.ndarray:
        return read_reconstruction(self, h, ledger)


def initialize(n_visible: int, n_hidden: int, params: DeviceParams, rng: np.random.Generator,
               s_norm_override: float | None = None, ddof: int = 0, ledger=None,
               wire_energy_per_read: float = 0.0, matched: bool = False) -> SynapseArray:
    """RESET every cell and freeze the normalization constants.

    ``ddof=0`` gives the population standard deviation for S.

    With ``matched`` the G- bank is a copy of the G+ bank, so every initial
    weight is exactly zero.  S is still taken from an independently drawn
    G- bank (unless overridden), which keeps the weight step of each pulse
    the same as for an ordinary initialization; M is then 0.
    """
    if n_visible < 1 or n_hidden < 1:
        raise ValueError(f"array dimensions must be >= 1, got {n_visible}x{n_hidden}")
    shape = (n_visible, n_hidden)
    plus = PcmCell.create(params, rng, shape, ledger=ledger)
    minus = PcmCell.create(params, rng, shape, ledger=ledger)
    diff = plus.g - minus.g
    m_norm = float(np.mean(diff))
    if matched:
        minus = plus.copy()
        m_norm = 0.0
    if s_norm_override is not None:
        if not s_norm_override > 0:
            raise ValueError(f"s_norm_override must be positive, got {s_norm_override}")
        s_norm = float(s_norm_override)
    else:
        s_norm = float(np.std(diff, ddof=ddof)) if diff.size > ddof else 0.0
        if not s_norm > 0:
            raise ZeroSpread("initial G+ - G- has zero spread; set s_norm_override")
    return SynapseArray(params, plus, minus, m_norm, s_norm, wire_energy_per_read)


def weights(array: SynapseArray) -> np.ndarray:
    return ((array.plus.g - array.minus.g) - array.m_norm) / array.s_norm


def apply_update(array: SynapseArray, i: int, j: int, direction: int, rng: np.random.Generator,
                 ledger=None) -> SynapseArray:
    """One partial-SET pulse on G+_ij (direction > 0) or G-_ij (direction < 0)."""
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    n_v, n_h = array.shape
    if not (0 <= i < n_v and 0 <= j < n_h):
        raise IndexError(f"synapse ({i}, {j}) outside {n_v}x{n_h} array")
    mask = np.zeros(array.shape, dtype=bool)
    mask[i, j] = True
    partial_set(array.plus if direction > 0 else array.minus, array.params, rng, where=mask, ledger=ledger)
    return array


def apply_sign_updates(array: SynapseArray, delta: np.ndarray, rng: np.random.Generator,
                       ledger=None) -> np.ndarray:
    """Pulse G+ where ``delta > 0`` and G- elsewhere (zero goes to G-).

    Returns the boolean mask of synapses whose G+ was pulsed.
    """
    delta = np.asarray(delta)
    if delta.shape != array.shape:
        raise ValueError(f"delta shape {delta.shape} != array shape {array.shape}")
    up = delta > 0
    partial_set(array.plus, array.params, rng, where=up, ledger=ledger)
    partial_set(array.minus, array.params, rng, where=~up, ledger=ledger)
    return up


def _read_cost(array: SynapseArray, g_sum: np.ndarray, active: np.ndarray, axis: int) -> float:
    # g_sum: G+ + G- per synapse; active lines select rows (axis=0) or columns (axis=1).
    # Inputs are amplitude-coded, so a line driven at x * v_read costs x**2 of a full read.
    per_line = g_sum.sum(axis=1 - axis)
    total_g = float(((active * active) @ per_line).sum())
    n_reads = int(np.count_nonzero(active))
    return float(read_energy(total_g, array.params)) + n_reads * array.wire_energy_per_read


def read_preactivation(array: SynapseArray, v, ledger=None) -> np.ndarray:
    """Hidden pre-activations ``W.T @ v`` for a visible vector (or a batch of rows).

    Every cell on an active visible line is read, in both branches of the
    differential pair; one ledger event is recorded per call.
    """
    v = np.asarray(v)
    if v.shape[-1] != array.n_visible:
        raise ValueError(f"visible vector length {v.shape[-1]} != {array.n_visible}")
    pre = v @ weights(array)
    if ledger is not None:
        g_sum = np.asarray(array.plus.g) + np.asarray(array.minus.g)
        ledger.add_read(_read_cost(array, g_sum, v.astype(float), axis=0))
    return pre


def read_reconstruction(array: SynapseArray, h, ledger=None) -> np.ndarray:
    """Visible pre-activations ``W @ h``; same read-energy contract as :func:`read_preactivation`."""
    h = np.asarray(h)
    if h.shape[-1] != array.n_hidden:
        raise ValueError(f"hidden vector length {h.shape[-1]} != {array.n_hidden}")
    pre = h @ weights(array).T
    if ledger is not None:
        g_sum = np.asarray(array.plus.g) + np.asarray(array.minus.g)
        ledger.add_read(_read_cost(array, g_sum, h.astype(float), axis=1))
    return pre
