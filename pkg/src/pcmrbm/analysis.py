"""Exact and sampled probabilistic measurements of a small RBM.

Everything works in the log domain.  The hidden layer is summed out
analytically, so exact quantities cost ``2**n_visible`` terms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp, softmax

from .datasets import all_configurations, config_index
from .rbm import as_model

MAX_ENUM_VISIBLE = 20
MAX_ENUM_HIDDEN = 20
MAX_MISSING = 12


class TooLarge(ValueError):
    pass


class TooManyMissing(ValueError):
    pass


@dataclass
class ModelDistribution:
    p_v: np.ndarray
    log_z: float
    log_p_v: np.ndarray


def log_unnormalized_marginal(model, v) -> np.ndarray:
    """``log sum_h exp(-E(v, h))`` for visible vector(s) ``v``."""
    m = as_model(model)
    v = np.asarray(v, dtype=float)
    return v @ m.a + np.logaddexp(0.0, m.b + v @ m.w).sum(axis=-1)


def exact_distribution(model) -> ModelDistribution:
    m = as_model(model)
    if m.n_visible > MAX_ENUM_VISIBLE or m.n_hidden > MAX_ENUM_HIDDEN:
        raise TooLarge(f"{m.n_visible}x{m.n_hidden} exceeds the enumeration guard "
                       f"({MAX_ENUM_VISIBLE}x{MAX_ENUM_HIDDEN})")
    log_f = log_unnormalized_marginal(m, all_configurations(m.n_visible))
    log_z = float(logsumexp(log_f))
    log_p = log_f - log_z
    return ModelDistribution(p_v=np.exp(log_p), log_z=log_z, log_p_v=log_p)


def kl_divergence(data_dist, model_dist: ModelDistribution) -> float:
    """KL(data || model) in nats."""
    p = np.asarray(data_dist, dtype=float)
    if p.shape != model_dist.log_p_v.shape:
        raise ValueError(f"data distribution has {p.size} states, model has {model_dist.log_p_v.size}")
    s = p > 0
    kl = float(np.sum(p[s] * (np.log(p[s]) - model_dist.log_p_v[s])))
    return max(kl, 0.0)


@dataclass(frozen=True)
class AisConfig:
    n_temperatures: int = 1000
    n_chains: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n_temperatures < 2:
            raise ValueError("n_temperatures must be >= 2")
        if self.n_chains < 1:
            raise ValueError("n_chains must be >= 1")


def ais_log_weights(model, config: AisConfig, rng: np.random.Generator) -> np.ndarray:
    """Per-chain log importance weights of annealed importance sampling.

    Intermediate distributions scale every parameter by beta on a linear grid
    from 0 (uniform base, all parameters zero) to 1 (the model).  Each
    temperature applies one Gibbs sweep, hidden then visible.
    """
    m = as_model(model)
    w, a, b = m.w, m.a, m.b
    betas = np.linspace(0.0, 1.0, config.n_temperatures)

    def log_f(v, beta):
        return beta * (v @ a) + np.logaddexp(0.0, beta * (b + v @ w)).sum(axis=-1)

    v = (rng.random((config.n_chains, m.n_visible)) < 0.5).astype(float)
    log_w = np.zeros(config.n_chains)
    for t in range(1, config.n_temperatures):
        beta = betas[t]
        log_w += log_f(v, beta) - log_f(v, betas[t - 1])
        if t < config.n_temperatures - 1:
            h = (rng.random((config.n_chains, m.n_hidden)) < expit(beta * (b + v @ w))).astype(float)
            v = (rng.random((config.n_chains, m.n_visible)) < expit(beta * (a + h @ w.T))).astype(float)
    return log_w


def ais_log_z(model, config: AisConfig = AisConfig(), rng: np.random.Generator | None = None) -> float:
    m = as_model(model)
    rng = np.random.default_rng(config.seed) if rng is None else rng
    log_w = ais_log_weights(m, config, rng)
    log_z_base = (m.n_visible + m.n_hidden) * np.log(2.0)
    return float(logsumexp(log_w) - np.log(config.n_chains) + log_z_base)


def ais_kl_divergence(data_dist, model, config: AisConfig = AisConfig(), rng=None) -> float:
    """KL(data || model) using an AIS estimate of log Z in place of the exact one."""
    m = as_model(model)
    p = np.asarray(data_dist, dtype=float)
    s = np.flatnonzero(p > 0)
    log_p_model = log_unnormalized_marginal(m, all_configurations(m.n_visible)[s]) - ais_log_z(m, config, rng)
    return float(np.sum(p[s] * (np.log(p[s]) - log_p_model)))


@dataclass
class InferenceResult:
    mask: np.ndarray
    observed: np.ndarray
    missing: np.ndarray  # indices of masked pixels
    assignments: np.ndarray  # (2**n_missing, n_missing)
    posterior: np.ndarray
    p_white: np.ndarray  # per missing pixel

    def to_dict(self) -> dict:
        return {
            "mask": "".join(str(int(x)) for x in self.mask),
            "observed": "".join("?" if mk else str(int(x)) for x, mk in zip(self.observed, self.mask)),
            "posterior": [
                {"assignment": "".join(str(int(x)) for x in a), "p": float(p)}
                for a, p in zip(self.assignments, self.posterior)
            ],
            "p_white_per_pixel": {str(int(i)): float(p) for i, p in zip(self.missing, self.p_white)},
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @property
    def map_assignment(self) -> np.ndarray:
        return self.assignments[int(np.argmax(self.posterior))]


def infer_missing_pixels(model, observed, mask) -> InferenceResult:
    """Exact posterior over the masked pixels given the unmasked ones.

    ``mask`` is 1 where a pixel is missing; the values of ``observed`` at
    masked positions are ignored.
    """
    m = as_model(model)
    observed = np.asarray(observed, dtype=np.int8).reshape(-1)
    mask = np.asarray(mask).astype(bool).reshape(-1)
    if observed.size != m.n_visible or mask.size != m.n_visible:
        raise ValueError(f"pattern and mask must have length {m.n_visible}")
    missing = np.flatnonzero(mask)
    if missing.size > MAX_MISSING:
        raise TooManyMissing(f"{missing.size} missing pixels exceeds the guard of {MAX_MISSING}")
    assignments = all_configurations(missing.size)
    candidates = np.repeat(observed[None, :], len(assignments), axis=0)
    candidates[:, missing] = assignments
    log_f = log_unnormalized_marginal(m, candidates)
    posterior = softmax(log_f)
    p_white = posterior @ assignments if missing.size else np.zeros(0)
    return InferenceResult(mask.astype(np.int8), observed, missing, assignments, posterior, p_white)


def pixel_recovery_probabilities(model, patterns) -> np.ndarray:
    """P(correct value of pixel i | all other pixels) for every pattern and pixel.

    Returns shape (n_patterns, n_visible).
    """
    m = as_model(model)
    pats = np.atleast_2d(np.asarray(patterns, dtype=float))
    log_f = log_unnormalized_marginal(m, pats)
    out = np.empty(pats.shape)
    for i in range(m.n_visible):
        flipped = pats.copy()
        flipped[:, i] = 1 - flipped[:, i]
        out[:, i] = expit(log_f - log_unnormalized_marginal(m, flipped))
    return out


def recovery_error_rate(model, patterns) -> float:
    """1 - mean P(correct pixel) over every stored pattern and single-pixel mask."""
    pats = np.atleast_2d(np.asarray(patterns))
    if pats.shape[0] == 0:
        raise ValueError("patterns must be nonempty")
    return float(1.0 - pixel_recovery_probabilities(model, pats).mean())


def recovery_success_rate(model, patterns) -> float:
    """Fraction of (pattern, mask) cases whose MAP completion is correct."""
    return float((pixel_recovery_probabilities(model, patterns) > 0.5).mean())


def data_log_likelihood(model, data_dist) -> float:
    """Expected log-likelihood of the data under the model, ``sum p_data log p_model``."""
    dist = exact_distribution(model)
    p = np.asarray(data_dist, dtype=float)
    s = p > 0
    return float(np.sum(p[s] * dist.log_p_v[s]))


__all__ = [
    "AisConfig", "InferenceResult", "ModelDistribution", "TooLarge", "TooManyMissing",
    "ais_kl_divergence", "ais_log_weights", "ais_log_z", "config_index", "data_log_likelihood",
    "exact_distribution", "infer_missing_pixels", "kl_divergence", "log_unnormalized_marginal",
    "pixel_recovery_probabilities", "recovery_error_rate", "recovery_success_rate",
]
