"""Bars-and-stripes images.

Pixels are stored row-major with 1 = white (ON) and 0 = black (OFF).  A
visible configuration ``v`` of length ``n`` has index ``int("".join(v), 2)``,
i.e. pixel 0 is the most significant bit; the empirical distributions
below use that ordering.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_DISTINCT_3x3 = 14


def sample_bars_stripes(rng: np.random.Generator, side: int = 3) -> np.ndarray:
    """Draw one image: pick an orientation, then switch each line on with p=1/2."""
    horizontal = rng.random() < 0.5
    lines = (rng.random(side) < 0.5).astype(np.int8)
    img = np.repeat(lines[:, None], side, axis=1) if horizontal else np.repeat(lines[None, :], side, axis=0)
    return img.reshape(-1)


def generation_paths(side: int = 3) -> np.ndarray:
    """All 2 * 2**side (orientation, lines) outcomes, duplicates included.

    Horizontal outcomes come first, each block in binary order of the lines.
    """
    out = []
    for horizontal in (True, False):
        for code in range(2 ** side):
            lines = np.array([(code >> (side - 1 - r)) & 1 for r in range(side)], dtype=np.int8)
            img = np.repeat(lines[:, None], side, axis=1) if horizontal else np.repeat(lines[None, :], side, axis=0)
            out.append(img.reshape(-1))
    return np.array(out, dtype=np.int8)


def enumerate_distinct(side: int = 3) -> np.ndarray:
    """Distinct bars-and-stripes images, in first-seen order of :func:`generation_paths`."""
    seen, out = set(), []
    for p in generation_paths(side):
        key = p.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(p)
    return np.array(out, dtype=np.int8)


def generator_probability(pattern, side: int = 3) -> float:
    """Probability that :func:`sample_bars_stripes` emits ``pattern``."""
    pattern = np.asarray(pattern)
    hits = sum(np.array_equal(p, pattern) for p in generation_paths(side))
    return hits / (2 * 2 ** side)


def is_bars_or_stripes(pattern, side: int = 3) -> bool:
    img = np.asarray(pattern).reshape(side, side)
    return bool((img == img[:, :1]).all() or (img == img[:1, :]).all())


def config_index(v) -> np.ndarray | int:
    """Index of binary vector(s) in the visible-configuration enumeration."""
    v = np.asarray(v, dtype=np.int64)
    n = v.shape[-1]
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    idx = v @ weights
    return int(idx) if np.ndim(idx) == 0 else idx


def all_configurations(n: int) -> np.ndarray:
    """Every binary vector of length ``n``, row ``i`` being configuration index ``i``."""
    idx = np.arange(2 ** n, dtype=np.int64)[:, None]
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)[None, :]
    return ((idx >> shifts) & 1).astype(np.int8)


def pattern_to_str(p) -> str:
    return "".join(str(int(x)) for x in np.asarray(p).reshape(-1))


def pattern_from_str(s: str) -> np.ndarray:
    s = s.strip()
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"pattern must be a 0/1 string, got {s!r}")
    return np.array([int(c) for c in s], dtype=np.int8)


@dataclass
class DataSet:
    patterns: np.ndarray  # (n_patterns, n_visible) int8
    empirical: np.ndarray  # (2**n_visible,) probabilities

    @classmethod
    def from_patterns(cls, patterns) -> "DataSet":
        patterns = np.atleast_2d(np.asarray(patterns, dtype=np.int8))
        if patterns.shape[0] == 0:
            raise ValueError("dataset must be nonempty")
        n = patterns.shape[1]
        counts = np.bincount(config_index(patterns), minlength=2 ** n)
        return cls(patterns=patterns, empirical=counts / counts.sum())

    @property
    def n_visible(self) -> int:
        return self.patterns.shape[1]

    def __len__(self) -> int:
        return self.patterns.shape[0]

    def distinct(self) -> np.ndarray:
        return np.unique(self.patterns, axis=0)


def make_training_set(n_patterns: int, rng: np.random.Generator, side: int = 3, mode: str = "distinct") -> DataSet:
    """Random training subset of the bars-and-stripes family.

    ``mode`` selects what is subsampled:

    ``"distinct"``  n of the distinct images, without replacement (default)
    ``"multiset"``  n of the 2*2**side generation outcomes, without
                    replacement, so the all-ON/all-OFF images may appear twice
    ``"sampler"``   n independent draws from :func:`sample_bars_stripes`
    """
    if mode == "distinct":
        pool = enumerate_distinct(side)
    elif mode == "multiset":
        pool = generation_paths(side)
    elif mode == "sampler":
        if n_patterns < 1:
            raise ValueError(f"n_patterns must be >= 1, got {n_patterns}")
        return DataSet.from_patterns([sample_bars_stripes(rng, side) for _ in range(n_patterns)])
    else:
        raise ValueError(f"unknown dataset mode {mode!r}")
    if not 1 <= n_patterns <= len(pool):
        raise ValueError(f"n_patterns must be in [1, {len(pool)}] for mode {mode!r}, got {n_patterns}")
    pick = np.sort(rng.choice(len(pool), size=n_patterns, replace=False))
    return DataSet.from_patterns(pool[pick])
