import math

import numpy as np
import pytest

from pcmrbm.crossbar import initialize
from pcmrbm.datasets import make_training_set
from pcmrbm.device import DeviceParams
from pcmrbm.energy import (MEASURED_PCM_SPLIT, PRESETS, ConventionalHwModel, EnergyLedger, PcmArrayModel,
                           comparison_report, conventional_epoch_energy, format_report, pcm_epoch_energy_estimate,
                           simulated_epoch_report)
from pcmrbm.rbm import train_epoch_hardware


def test_conventional_components():
    b = conventional_epoch_energy()
    assert b.ops_v2h_pass == 73.125 and b.ops_h2v_pass == 45.0 and b.ops_update == 6.0
    assert (b.n_v2h_passes, b.n_h2v_passes) == (4, 3)
    assert b.n_v2h_passes * b.ops_v2h_pass + b.n_h2v_passes * b.ops_h2v_pass == 427.5
    assert b.total_ops == 433.5
    assert b.cd_passes_j == pytest.approx(427.5e-9, rel=1e-12)
    assert b.update_j == pytest.approx(6e-9, rel=1e-12)
    assert b.logic_j == pytest.approx(433.5e-9, rel=1e-12)
    assert b.total_j == pytest.approx(913.5e-9, rel=1e-12)
    assert abs(b.total_j / 910e-9 - 1) < 0.01


def test_conventional_linearity():
    assert conventional_epoch_energy(ConventionalHwModel(e_vector_op=0, memory_access_j=0)).total_j == 0
    one = conventional_epoch_energy(ConventionalHwModel(e_vector_op=1e-9, memory_access_j=0))
    two = conventional_epoch_energy(ConventionalHwModel(e_vector_op=2e-9, memory_access_j=0))
    assert two.total_j == 2 * one.total_j
    with pytest.raises(ValueError):
        ConventionalHwModel(e_vector_op=-1)


def test_sixteen_bit_preset():
    r = comparison_report("experiment-16bit")
    assert r["conventional"]["total_j"] == pytest.approx(913.5e-9 / 4, rel=1e-12)
    assert abs(r["relative_deviation_from_reported"]["conventional"]) < 0.01
    assert abs(r["relative_deviation_from_reported"]["pcm"]) < 0.02


def test_pcm_array_constants():
    m = PcmArrayModel()
    assert m.e_set == pytest.approx(72e-12, rel=1e-12)
    assert round(m.e_set * 1e12, 9) == 72.0
    assert m.e_reset == pytest.approx(2.2 * 200e-6 * 50e-9, rel=1e-12)
    assert m.g_mean == pytest.approx(5.025e-5, rel=1e-12)
    with pytest.raises(ValueError):
        PcmArrayModel(r_low=0)


def test_pcm_estimate_scales_with_counts():
    m = PcmArrayModel()
    b = pcm_epoch_energy_estimate(m, pulses_per_epoch=45, reads_per_epoch=630)
    assert b.set_j == 45 * m.e_set and b.read_j == 630 * m.e_read and b.reset_j == 0
    assert b.total_j == pytest.approx(19.07e-9, rel=1e-3)


def test_one_gigabit_report_within_loose_band():
    r = comparison_report("pcm-1gb")
    dev = r["relative_deviation_from_reported"]
    assert abs(dev["conventional"]) < 0.15 and abs(dev["pcm"]) < 0.15
    assert "bits_read" in r["assumptions"] and "pcm_device_reads_per_epoch" in r["assumptions"]
    assert "vs reported" in format_report(r)


def test_measured_preset_ratio():
    r = comparison_report("experiment-64bit")
    assert r["pcm_total_j"] == pytest.approx(sum(MEASURED_PCM_SPLIT), rel=1e-12)
    assert r["ratio"] == pytest.approx(913.5 / 6.1, rel=1e-9)
    assert r["preset"] == "experiment-64bit" and set(PRESETS) >= {"experiment-64bit", "experiment-16bit", "pcm-1gb"}


def test_ledger_conservation_and_validation():
    led = EnergyLedger(keep_events=True)
    rng = np.random.default_rng(0)
    vals = rng.random(1000) * 1e-12
    for x in vals[:500]:
        led.add_programming(x)
    led.close_epoch()
    for x in vals[500:]:
        led.add_read(x)
    led.close_epoch()
    assert led.total_programming_j + led.total_read_j == math.fsum(vals)
    assert math.fsum(e for _, _, e in led.events) == math.fsum(vals)
    with pytest.raises(ValueError):
        led.add_read(-1.0)
    with pytest.raises(ValueError):
        simulated_epoch_report(EnergyLedger())


def _train(p, epochs=30, seed=0):
    rng = np.random.default_rng(seed)
    ds = make_training_set(5, rng)
    led = EnergyLedger()
    arr = initialize(9, 5, p, rng, ledger=led)
    led.close_epoch()
    for _ in range(epochs):
        train_epoch_hardware(arr, ds, 3, rng, ledger=led)
    return simulated_epoch_report(led)


def test_simulated_programming_energy_is_constant():
    rows = _train(DeviceParams())
    assert len(rows) == 30 and rows[0]["epoch"] == 1
    assert all(r["programming_j"] == math.fsum([72e-12] * 45) for r in rows)


def test_doubling_pulse_energy_doubles_programming():
    a = _train(DeviceParams(), epochs=3, seed=1)
    b = _train(DeviceParams(e_partial_set=144e-12), epochs=3, seed=1)
    assert all(y["programming_j"] == 2 * x["programming_j"] for x, y in zip(a, b))


def test_initialization_row_holds_resets():
    led = EnergyLedger()
    initialize(9, 5, DeviceParams(), np.random.default_rng(0), ledger=led)
    led.close_epoch()
    rows = simulated_epoch_report(led, include_initialization=True)
    assert rows[0]["programming_j"] == math.fsum([100e-12] * 90)
