import numpy as np
import pytest
from scipy.stats import chisquare

from pcmrbm.datasets import (DataSet, all_configurations, config_index, enumerate_distinct, generation_paths,
                             generator_probability, is_bars_or_stripes, make_training_set, pattern_from_str,
                             pattern_to_str, sample_bars_stripes)

ALL_ON = np.ones(9, dtype=np.int8)
ALL_OFF = np.zeros(9, dtype=np.int8)


def test_distinct_count_and_uniqueness():
    pats = enumerate_distinct()
    assert len(pats) == 14
    assert len({p.tobytes() for p in pats}) == 14
    assert sum(np.array_equal(p, ALL_ON) for p in pats) == 1
    assert sum(np.array_equal(p, ALL_OFF) for p in pats) == 1
    assert len(generation_paths()) == 16


def test_each_pixel_on_half_the_time():
    assert np.array_equal(enumerate_distinct().sum(axis=0), np.full(9, 7))


def test_generator_probabilities():
    assert generator_probability(ALL_ON) == 1 / 8
    assert generator_probability(ALL_OFF) == 1 / 8
    rows_on_off_on = np.array([1, 1, 1, 0, 0, 0, 1, 1, 1])
    assert generator_probability(rows_on_off_on) == 1 / 16
    assert sum(generator_probability(p) for p in enumerate_distinct()) == 1.0
    assert generator_probability(np.array([1, 0, 0, 0, 0, 0, 0, 0, 0])) == 0


def test_sampler_hits_only_valid_patterns_with_right_frequencies():
    rng = np.random.default_rng(0)
    n = 100_000
    pats = enumerate_distinct()
    index = {p.tobytes(): i for i, p in enumerate(pats)}
    counts = np.zeros(len(pats))
    for _ in range(n):
        s = sample_bars_stripes(rng)
        assert is_bars_or_stripes(s)
        counts[index[s.tobytes()]] += 1
    expected = n * np.array([generator_probability(p) for p in pats])
    assert chisquare(counts, expected).pvalue > 0.001


def test_every_distinct_pattern_reachable():
    assert all(generator_probability(p) > 0 for p in enumerate_distinct())


def test_config_index_order():
    assert config_index(np.array([1, 0, 0])) == 4
    assert config_index(ALL_ON) == 511
    allc = all_configurations(4)
    assert np.array_equal(config_index(allc), np.arange(16))


def test_pattern_strings():
    p = pattern_from_str("111000111")
    assert pattern_to_str(p) == "111000111"
    for bad in ("", "1102", "abc"):
        with pytest.raises(ValueError):
            pattern_from_str(bad)


def test_training_set_examples():
    full = make_training_set(14, np.random.default_rng(0))
    assert len(full.distinct()) == 14
    a = make_training_set(5, np.random.default_rng(1))
    b = make_training_set(5, np.random.default_rng(1))
    assert np.array_equal(a.patterns, b.patterns)
    assert len(a) == 5 and len(a.distinct()) == 5
    nz = a.empirical[a.empirical > 0]
    assert np.allclose(nz, 0.2) and a.empirical.sum() == pytest.approx(1.0)
    assert set(np.flatnonzero(a.empirical)) == set(config_index(a.patterns))


@pytest.mark.parametrize("n", [0, 15])
def test_training_set_out_of_range(n):
    with pytest.raises(ValueError):
        make_training_set(n, np.random.default_rng(0))


def test_multiset_and_sampler_modes():
    m = make_training_set(16, np.random.default_rng(0), mode="multiset")
    assert len(m) == 16 and len(m.distinct()) == 14
    assert m.empirical[511] == pytest.approx(2 / 16)
    s = make_training_set(20, np.random.default_rng(0), mode="sampler")
    assert len(s) == 20 and all(is_bars_or_stripes(p) for p in s.patterns)
    with pytest.raises(ValueError):
        make_training_set(3, np.random.default_rng(0), mode="bogus")


def test_dataset_rejects_empty():
    with pytest.raises(ValueError):
        DataSet.from_patterns(np.zeros((0, 9)))
