"""Binary RBM with fixed zero biases, CD-k statistics, and two trainers:

* :func:`train_epoch_hardware` applies one sign-directed partial-SET pulse
  per synapse of a :class:`~pcmrbm.crossbar.SynapseArray` each epoch;
* :func:`train_epoch_baseline` is the ideal floating-point reference that
  adds the full CD gradient times a learning rate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .crossbar import SynapseArray, apply_sign_updates
from .datasets import DataSet
from .device import set_curve

STATISTICS = ("sampled", "mean-field", "probabilities")


@dataclass
class RbmModel:
    """RBM parameters. ``source`` is a SynapseArray (hardware) or a weight matrix."""

    source: SynapseArray | np.ndarray
    a: np.ndarray = None
    b: np.ndarray = None

    def __post_init__(self):
        if not isinstance(self.source, SynapseArray):
            self.source = np.asarray(self.source, dtype=float)
            if self.source.ndim != 2:
                raise ValueError("weight matrix must be 2-D")
        n_v, n_h = self.shape
        self.a = np.zeros(n_v) if self.a is None else np.asarray(self.a, dtype=float)
        self.b = np.zeros(n_h) if self.b is None else np.asarray(self.b, dtype=float)

    @property
    def hardware(self) -> bool:
        return isinstance(self.source, SynapseArray)

    @property
    def shape(self) -> tuple[int, int]:
        return self.source.shape

    @property
    def n_visible(self) -> int:
        return self.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.shape[1]

    @property
    def w(self) -> np.ndarray:
        return self.source.weights() if self.hardware else self.source

    def snapshot(self) -> "RbmModel":
        """Software copy with the current mapped weights."""
        return RbmModel(np.array(self.w), self.a.copy(), self.b.copy())


def as_model(model) -> RbmModel:
    if isinstance(model, RbmModel):
        return model
    return RbmModel(model)


@dataclass
class CdStats:
    data_term: np.ndarray
    model_term: np.ndarray

    @property
    def delta(self) -> np.ndarray:
        return self.data_term - self.model_term


@dataclass
class TrainConfig:
    epochs: int = 30
    k: int = 3
    baseline_learning_rate: float | None = None
    statistics: str = "probabilities"

    def __post_init__(self):
        if self.statistics not in STATISTICS:
            raise ValueError(f"statistics must be one of {STATISTICS}, got {self.statistics!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.baseline_learning_rate is not None and not self.baseline_learning_rate > 0:
            raise ValueError("baseline_learning_rate must be positive")


def energy(model, v, h) -> float:
    m = as_model(model)
    v = np.asarray(v, dtype=float)
    h = np.asarray(h, dtype=float)
    return float(-m.a @ v - m.b @ h - v @ m.w @ h)


def p_hidden_given_visible(model, v) -> np.ndarray:
    m = as_model(model)
    return expit(m.b + np.asarray(v, dtype=float) @ m.w)


def p_visible_given_hidden(model, h) -> np.ndarray:
    m = as_model(model)
    return expit(m.a + np.asarray(h, dtype=float) @ m.w.T)


def _bernoulli(p, rng):
    return (rng.random(np.shape(p)) < p).astype(np.int8)


def _hidden_probs(m: RbmModel, v, ledger):
    if m.hardware and ledger is not None:
        return expit(m.b + m.source.read_preactivation(v, ledger))
    return expit(m.b + np.asarray(v, dtype=float) @ m.w)


def _visible_probs(m: RbmModel, h, ledger):
    if m.hardware and ledger is not None:
        return expit(m.a + m.source.read_reconstruction(h, ledger))
    return expit(m.a + np.asarray(h, dtype=float) @ m.w.T)


def sample_hidden(model, v, rng: np.random.Generator, ledger=None) -> np.ndarray:
    return _bernoulli(_hidden_probs(as_model(model), v, ledger), rng)


def sample_visible(model, h, rng: np.random.Generator, ledger=None) -> np.ndarray:
    return _bernoulli(_visible_probs(as_model(model), h, ledger), rng)


def cd_statistics(model, dataset: DataSet | np.ndarray, k: int, rng: np.random.Generator,
                  ledger=None, statistics: str = "probabilities") -> CdStats:
    """Positive and negative CD-k statistics averaged over the dataset.

    The chain starts at each data vector: ``h0 ~ p(h|v*)`` gives the data term,
    then ``k`` rounds of ``v ~ p(v|h)``, ``h ~ p(h|v)`` give the model term.
    That is ``k + 1`` visible-to-hidden and ``k`` hidden-to-visible passes per
    data vector; each pass is one read of the hardware array.

    ``statistics`` selects what is accumulated:

    ``"sampled"``        ``v h`` with binary samples in both terms
    ``"mean-field"``     ``v p(h|v)`` in both terms; the chain still samples
    ``"probabilities"``  as ``"mean-field"``, and the final reconstruction is
                         ``p(v|h)`` instead of a binary sample (default)
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if statistics not in STATISTICS:
        raise ValueError(f"statistics must be one of {STATISTICS}, got {statistics!r}")
    m = as_model(model)
    data = dataset.patterns if isinstance(dataset, DataSet) else np.atleast_2d(dataset)
    if data.shape[0] == 0:
        raise ValueError("dataset must be nonempty")
    data = data.astype(float)
    n = data.shape[0]
    soft = statistics != "sampled"

    ph = _hidden_probs(m, data, ledger)
    h = _bernoulli(ph, rng)
    data_term = data.T @ (ph if soft else h) / n

    v = data
    for step in range(k):
        pv = _visible_probs(m, h, ledger)
        v = _bernoulli(pv, rng)
        if statistics == "probabilities" and step == k - 1:
            v = pv
        ph = _hidden_probs(m, v, ledger)
        h = _bernoulli(ph, rng)
    model_term = np.asarray(v, dtype=float).T @ (ph if soft else h) / n
    return CdStats(data_term, model_term)


def train_epoch_hardware(array: SynapseArray, dataset, k: int, rng: np.random.Generator, ledger=None,
                         stats: CdStats | None = None, statistics: str = "probabilities",
                         close_epoch: bool = True) -> CdStats:
    """One epoch of sign-only CD on the synapse array (mutated in place).

    Every synapse receives exactly one partial-SET pulse: on G+ if the CD
    difference is positive, otherwise on G- (a zero difference goes to G-).
    ``stats`` may be injected to bypass sampling.  When a ledger is given
    the epoch is closed on it unless ``close_epoch`` is false.
    """
    if stats is None:
        stats = cd_statistics(RbmModel(array), dataset, k, rng, ledger=ledger, statistics=statistics)
    apply_sign_updates(array, stats.delta, rng, ledger=ledger)
    if ledger is not None and close_epoch:
        ledger.close_epoch()
    return stats


def train_epoch_baseline(w, dataset, k: int, eta: float, rng: np.random.Generator,
                         stats: CdStats | None = None, statistics: str = "probabilities") -> np.ndarray:
    """Full-gradient CD update on a floating-point weight matrix; returns the new matrix."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    w = np.asarray(w, dtype=float)
    if stats is None:
        stats = cd_statistics(RbmModel(w), dataset, k, rng, statistics=statistics)
    return w + eta * stats.delta


def default_baseline_learning_rate(array: SynapseArray) -> float:
    """Mean noiseless first-pulse weight step of the array's devices, ``(G(1) - G(0)) / S``."""
    n_levels = array.params.n_levels
    steps = [set_curve(1, c.g_min_i, c.g_max_i, n_levels) - set_curve(0, c.g_min_i, c.g_max_i, n_levels)
             for c in (array.plus, array.minus)]
    return float(np.mean(np.concatenate([np.ravel(s) for s in steps])) / array.s_norm)
