"""Restricted Boltzmann machine training on simulated differential phase-change-memory synapses.

Modules
-------
device      single-cell conductance model (partial SET, RESET, read)
crossbar    differential 2-PCM synapse array and weight mapping
rbm         RBM definition, CD-k statistics, hardware and baseline trainers
analysis    exact distribution, KL, AIS, missing-pixel inference
datasets    bars-and-stripes images
energy      energy ledger and conventional / large-array estimators
experiments seeded multi-trial drivers writing CSV
cli         ``pcm-rbm`` command line
"""
from .analysis import (AisConfig, InferenceResult, ModelDistribution, TooLarge, TooManyMissing, ais_kl_divergence,
                       ais_log_z, exact_distribution, infer_missing_pixels, kl_divergence, recovery_error_rate,
                       recovery_success_rate)
from .crossbar import SynapseArray, ZeroSpread, initialize
from .datasets import DataSet, enumerate_distinct, make_training_set, sample_bars_stripes
from .device import DeviceParams, PcmCell, partial_set, reset, set_curve
from .energy import (ConventionalHwModel, EnergyLedger, PcmArrayModel, comparison_report,
                     conventional_epoch_energy, pcm_epoch_energy_estimate, simulated_epoch_report)
from .experiments import (ConfigError, ExperimentConfig, run_device_sweep, run_energy_report, run_pattern_sweep,
                          run_training_experiment)
from .rbm import CdStats, RbmModel, TrainConfig, cd_statistics, train_epoch_baseline, train_epoch_hardware

__version__ = "0.1.0"

__all__ = [
    "AisConfig", "CdStats", "ConfigError", "ConventionalHwModel", "DataSet", "DeviceParams", "EnergyLedger",
    "ExperimentConfig", "InferenceResult", "ModelDistribution", "PcmArrayModel", "PcmCell", "RbmModel",
    "SynapseArray", "TooLarge", "TooManyMissing", "TrainConfig", "ZeroSpread", "ais_kl_divergence", "ais_log_z",
    "cd_statistics", "comparison_report", "conventional_epoch_energy", "enumerate_distinct", "exact_distribution",
    "infer_missing_pixels", "initialize", "kl_divergence", "make_training_set", "partial_set",
    "pcm_epoch_energy_estimate", "recovery_error_rate", "recovery_success_rate", "reset", "run_device_sweep",
    "run_energy_report", "run_pattern_sweep", "run_training_experiment", "sample_bars_stripes", "set_curve",
    "simulated_epoch_report", "train_epoch_baseline", "train_epoch_hardware",
]
