import math

import numpy as np
import pytest

from pcmrbm.analysis import exact_distribution, kl_divergence
from pcmrbm.crossbar import initialize
from pcmrbm.datasets import DataSet, make_training_set
from pcmrbm.device import DeviceParams
from pcmrbm.energy import EnergyLedger
from pcmrbm.rbm import (CdStats, RbmModel, TrainConfig, cd_statistics, default_baseline_learning_rate, energy,
                        p_hidden_given_visible, p_visible_given_hidden, sample_hidden, sample_visible,
                        train_epoch_baseline, train_epoch_hardware)

from _oracles import naive_log_likelihood_gradient


def test_energy_examples():
    assert energy(np.zeros((9, 5)), np.ones(9), np.ones(5)) == 0
    assert energy(np.ones((9, 5)), np.ones(9), np.ones(5)) == -45
    w = np.zeros((9, 5))
    w[0, 0] = 2
    e0v, e0h = np.eye(9)[0], np.eye(5)[0]
    assert energy(w, e0v, e0h) == -2


def test_biases_are_zero():
    m = RbmModel(np.ones((3, 2)))
    assert np.array_equal(m.a, np.zeros(3)) and np.array_equal(m.b, np.zeros(2))


def test_conditionals():
    assert np.array_equal(p_hidden_given_visible(np.zeros((9, 5)), np.ones(9)), np.full(5, 0.5))
    w = np.zeros((9, 5))
    w[0, 0] = 30
    assert abs(p_hidden_given_visible(w, np.eye(9)[0])[0] - 1) < 1e-13
    w[0, 0] = 1
    assert p_hidden_given_visible(w, np.eye(9)[0])[0] == pytest.approx(0.7310585786300049, rel=1e-15)
    assert p_visible_given_hidden(w, np.eye(5)[0])[0] == pytest.approx(0.7310585786300049, rel=1e-15)


def test_sampling():
    w = np.full((9, 5), -1e3)
    assert not sample_hidden(w, np.ones(9), np.random.default_rng(0)).any()
    n = 100_000
    h = sample_hidden(np.zeros((9, 5)), np.ones((n, 9)), np.random.default_rng(1))
    assert np.all(np.abs(h.mean(axis=0) - 0.5) < 3 * 0.5 / math.sqrt(n))
    v = sample_visible(np.zeros((9, 5)), np.ones((n, 5)), np.random.default_rng(2))
    assert np.all(np.abs(v.mean(axis=0) - 0.5) < 3 * 0.5 / math.sqrt(n))
    a = sample_hidden(np.zeros((9, 5)), np.ones(9), np.random.default_rng(7))
    b = sample_hidden(np.zeros((9, 5)), np.ones(9), np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_cd_validates_inputs():
    ds = make_training_set(3, np.random.default_rng(0))
    with pytest.raises(ValueError):
        cd_statistics(np.zeros((9, 5)), ds, 0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        cd_statistics(np.zeros((9, 5)), ds, 3, np.random.default_rng(0), statistics="exact")
    with pytest.raises(ValueError):
        TrainConfig(k=0)
    with pytest.raises(ValueError):
        TrainConfig(statistics="bogus")


@pytest.mark.parametrize("statistics", ["sampled", "mean-field", "probabilities"])
def test_cd_data_term_under_zero_weights(statistics):
    ds = make_training_set(5, np.random.default_rng(3))
    rng = np.random.default_rng(4)
    reps = 10_000
    terms = np.array([cd_statistics(np.zeros((9, 5)), ds, 1, rng, statistics=statistics).data_term
                      for _ in range(reps)])
    expect = 0.5 * ds.patterns.mean(axis=0)[:, None] * np.ones((1, 5))
    se = terms.std(axis=0, ddof=1) / math.sqrt(reps) + 1e-15
    assert np.all(np.abs(terms.mean(axis=0) - expect) <= 3 * se + 1e-12)


def test_cd_all_zero_data():
    s = cd_statistics(np.random.default_rng(0).standard_normal((9, 5)), np.zeros((1, 9)), 3,
                      np.random.default_rng(0), statistics="sampled")
    assert np.array_equal(s.data_term, np.zeros((9, 5)))


def test_cd_model_term_at_equilibrium_with_zero_weights():
    ds = make_training_set(5, np.random.default_rng(5))
    rng = np.random.default_rng(6)
    terms = np.array([cd_statistics(np.zeros((9, 5)), ds, 10, rng, statistics="sampled").model_term
                      for _ in range(4000)])
    assert np.all(np.abs(terms.mean(axis=0) - 0.25) < 3 * terms.std(axis=0, ddof=1).max() / math.sqrt(4000))


def test_stats_entries_in_unit_interval():
    ds = make_training_set(5, np.random.default_rng(7))
    w = 3 * np.random.default_rng(8).standard_normal((9, 5))
    for mode in ("sampled", "mean-field", "probabilities"):
        s = cd_statistics(w, ds, 3, np.random.default_rng(9), statistics=mode)
        for t in (s.data_term, s.model_term):
            assert t.min() >= 0 and t.max() <= 1


def test_cd_long_chain_follows_likelihood_gradient():
    # 3 visible / 2 hidden toy: the CD statistics with a long chain estimate
    # the exact log-likelihood gradient
    rng = np.random.default_rng(10)
    w = rng.standard_normal((3, 2))
    data = np.array([[1, 0, 1], [0, 1, 1]])
    p_data = np.zeros(8)
    p_data[[5, 3]] = 0.5
    exact = naive_log_likelihood_gradient(w, p_data)
    reps = 3000
    est = np.array([cd_statistics(w, data, 30, rng, statistics="mean-field").delta for _ in range(reps)])
    se = est.std(axis=0, ddof=1) / math.sqrt(reps)
    assert np.all(np.abs(est.mean(axis=0) - exact) < 4 * se + 1e-3)


def test_hardware_epoch_routes_by_sign():
    p = DeviceParams()
    arr = initialize(9, 5, p, np.random.default_rng(11))
    delta = np.random.default_rng(12).standard_normal((9, 5))
    delta[0, :] = 0.0
    stats = CdStats(data_term=delta, model_term=np.zeros((9, 5)))
    ledger = EnergyLedger()
    train_epoch_hardware(arr, None, 3, np.random.default_rng(0), ledger=ledger, stats=stats)
    assert np.array_equal(arr.plus.pulses_applied == 1, delta > 0)
    assert np.array_equal(arr.minus.pulses_applied == 1, delta <= 0)
    assert ledger.history[-1].programming_j == pytest.approx(3.24e-9, rel=1e-12)
    assert ledger.history[-1].n_programming_events == 45


def test_hardware_epoch_ties_go_to_minus():
    arr = initialize(9, 5, DeviceParams(), np.random.default_rng(13))
    same = np.full((9, 5), 0.3)
    train_epoch_hardware(arr, None, 3, np.random.default_rng(0), stats=CdStats(same, same.copy()))
    assert arr.minus.pulses_applied.sum() == 45 and arr.plus.pulses_applied.sum() == 0


def test_hardware_epoch_read_accounting():
    p = DeviceParams()
    rng = np.random.default_rng(14)
    ds = make_training_set(5, rng)
    ledger = EnergyLedger()
    arr = initialize(9, 5, p, rng, ledger=ledger)
    ledger.close_epoch()
    reads = []
    for _ in range(20):
        train_epoch_hardware(arr, ds, 3, rng, ledger=ledger)
        row = ledger.history[-1]
        assert row.n_read_events == 7  # 4 visible-to-hidden + 3 hidden-to-visible passes
        assert row.programming_j == pytest.approx(45 * p.e_partial_set, rel=1e-12)
        reads.append(row.read_j)
    assert reads[-1] > reads[0]


def test_read_energy_non_decreasing_in_noiseless_run():
    # full-input reads only depend on conductance, which never decreases
    p = DeviceParams(sigma_c2c=0.0)
    arr = initialize(9, 5, p, np.random.default_rng(15))
    ones = DataSet.from_patterns(np.ones((1, 9), dtype=int))
    rng = np.random.default_rng(16)
    last = 0.0
    for _ in range(30):
        ledger = EnergyLedger()
        arr.read_preactivation(np.ones(9), ledger)
        assert ledger.read_j >= last
        last = ledger.read_j
        train_epoch_hardware(arr, ones, 3, rng)


def test_baseline_update():
    w = np.zeros((9, 5))
    same = np.full((9, 5), 0.2)
    assert np.array_equal(train_epoch_baseline(w, None, 3, 0.1, None, stats=CdStats(same, same)), w)
    out = train_epoch_baseline(w, None, 3, 0.1, None, stats=CdStats(np.ones((9, 5)), np.zeros((9, 5))))
    assert np.allclose(out, 0.1)
    with pytest.raises(ValueError):
        train_epoch_baseline(w, None, 3, 0.0, None)


def test_determinism_of_both_trainers():
    def run(seed):
        rng = np.random.default_rng(seed)
        ds = make_training_set(5, rng)
        arr = initialize(9, 5, DeviceParams(), rng)
        w = arr.weights().copy()
        eta = default_baseline_learning_rate(arr)
        for _ in range(10):
            train_epoch_hardware(arr, ds, 3, rng)
            w = train_epoch_baseline(w, ds, 3, eta, rng)
        return arr.weights(), w

    a, b = run(17), run(17)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_default_learning_rate_matches_first_step():
    p = DeviceParams(sigma_c2c=0.0, sigma_d2d=0.0)
    arr = initialize(2, 2, p, np.random.default_rng(0), s_norm_override=1e-6)
    g1 = p.g_min + (p.g_max - p.g_min) * (1 - math.exp(-3 / p.n_levels))
    assert default_baseline_learning_rate(arr) == pytest.approx((g1 - p.g_min) / 1e-6, rel=1e-12)


def test_baseline_keeps_improving_to_epoch_70():
    better = 0
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        ds = make_training_set(5, rng)
        arr = initialize(9, 5, DeviceParams(), rng)
        w = arr.weights().copy()
        eta = default_baseline_learning_rate(arr)
        kl = {}
        for ep in range(1, 71):
            w = train_epoch_baseline(w, ds, 3, eta, rng)
            if ep in (10, 70):
                kl[ep] = kl_divergence(ds.empirical, exact_distribution(w))
        better += kl[70] < kl[10]
    assert better >= 3
