"""Seeded, multi-trial experiment drivers writing plot-ready CSV.

Three experiment kinds share one configuration type:

``train``           per-epoch KL, error rate and energy of the 2-PCM network,
                    with the floating-point baseline trained alongside
``sweep-patterns``  error rate vs number of stored patterns at checkpoints
``sweep-device``    final KL and error rate over a sigma_c2c x n_levels grid

A fourth kind, ``energy-report``, compares the simulated per-epoch energy
with the analytical conventional-hardware estimate.

Every trial draws from its own random stream, derived from the master seed
and the trial's position in the experiment (never from execution order), so
trials can run in any order or in parallel with identical results.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .analysis import (AisConfig, ais_kl_divergence, exact_distribution, kl_divergence, recovery_error_rate,
                       recovery_success_rate)
from .crossbar import SynapseArray, initialize
from .datasets import DataSet, make_training_set
from .device import DeviceParams
from .energy import PRESETS, EnergyLedger, comparison_report, format_report, simulated_epoch_report
from .rbm import RbmModel, TrainConfig, default_baseline_learning_rate, train_epoch_baseline, train_epoch_hardware

KINDS = ("train", "sweep-patterns", "sweep-device", "energy-report")
METRIC_COLUMNS = ("epoch", "kl_exact_nats", "kl_ais_nats", "err_rate", "prog_energy_j", "read_energy_j")
DEFAULT_SWEEP_PATTERNS = (2, 3, 4, 5, 8, 11, 14)
N_VISIBLE, N_HIDDEN = 9, 5


class ConfigError(ValueError):
    """Invalid experiment configuration (bad key, type or value)."""


@dataclass
class ExperimentConfig:
    kind: str = "train"
    trials: int = 5
    seed: int = 0
    # int for train / sweep-device / energy-report, list for sweep-patterns;
    # None picks 5 or the default sweep list
    n_patterns: Any = None
    dataset_mode: str = "distinct"
    # "device": ordinary RESET initialization; "zero": matched pairs, W = 0
    init: str = "device"
    s_norm_override: float | None = None
    n_hidden: int = N_HIDDEN
    out: str | None = None
    checkpoints: list = field(default_factory=lambda: [10, 30, 70])
    ais_every: int = 1
    record_conductance: bool = True
    baseline: bool = True
    sigma_c2c_grid: list = field(default_factory=lambda: [0.0, 0.1, 0.3, 0.5])
    n_levels_grid: list = field(default_factory=lambda: [1, 10, 42, 1000])
    energy_preset: str = "experiment-64bit"
    device: DeviceParams = field(default_factory=DeviceParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    ais: AisConfig = field(default_factory=AisConfig)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("trials", "seed", "n_hidden", "ais_every"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.n_hidden < 1:
            raise ConfigError(f"n_hidden must be >= 1, got {self.n_hidden}")
        if self.ais_every < 0:
            raise ConfigError("ais_every must be >= 0 (0 disables AIS)")
        if self.init not in ("device", "zero"):
            raise ConfigError(f"init must be 'device' or 'zero', got {self.init!r}")
        if self.dataset_mode not in ("distinct", "multiset", "sampler"):
            raise ConfigError(f"unknown dataset_mode {self.dataset_mode!r}")
        if self.energy_preset not in PRESETS:
            raise ConfigError(f"unknown energy preset {self.energy_preset!r}; choose from {sorted(PRESETS)}")
        for name in ("checkpoints", "sigma_c2c_grid", "n_levels_grid"):
            v = getattr(self, name)
            if not isinstance(v, (list, tuple)) or not v:
                raise ConfigError(f"{name} must be a nonempty list")
        if any(not isinstance(c, int) or c < 0 for c in self.checkpoints):
            raise ConfigError("checkpoints must be non-negative integers")
        counts = self.pattern_counts()
        limit = 14 if self.dataset_mode == "distinct" else 16
        if self.dataset_mode != "sampler" and any(not 1 <= n <= limit for n in counts):
            raise ConfigError(f"n_patterns must lie in [1, {limit}], got {counts}")

    def pattern_counts(self) -> list[int]:
        n = self.n_patterns
        if n is None:
            return list(DEFAULT_SWEEP_PATTERNS) if self.kind == "sweep-patterns" else [5]
        if isinstance(n, bool):
            raise ConfigError("n_patterns must be an integer or a list of integers")
        if isinstance(n, int):
            return [n]
        if isinstance(n, (list, tuple)) and n and all(isinstance(x, int) and not isinstance(x, bool) for x in n):
            return list(n)
        raise ConfigError(f"n_patterns must be an integer or a nonempty list of integers, got {n!r}")

    # --- (de)serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return _build(cls, d, "")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e.strerror}") from None
        return cls.from_json(text)

    def with_overrides(self, overrides: Iterable[str]) -> "ExperimentConfig":
        """Apply ``dotted.key=value`` overrides; values are parsed as JSON, else taken as strings."""
        d = self.to_dict()
        for item in overrides:
            key, sep, raw = item.partition("=")
            if not sep or not key:
                raise ConfigError(f"override must look like key=value, got {item!r}")
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
            node = d
            parts = key.split(".")
            for p in parts[:-1]:
                if not isinstance(node.get(p), dict):
                    raise ConfigError(f"unknown config section {p!r} in override {item!r}")
                node = node[p]
            if parts[-1] not in node:
                raise ConfigError(f"unknown config key {key!r}")
            node[parts[-1]] = value
        return ExperimentConfig.from_dict(d)


_NESTED = {"device": DeviceParams, "train": TrainConfig, "ais": AisConfig}


def _build(cls, d: dict, prefix: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{prefix or 'config'} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(d) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(prefix + k for k in unknown)}")
    kw = {}
    for k, v in d.items():
        sub = _NESTED.get(k) if cls is ExperimentConfig else None
        kw[k] = _build(sub, v, f"{k}.") if sub is not None else v
    try:
        return cls(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{prefix or 'config'}: {e}") from None


# --- random streams ------------------------------------------------------------

def trial_seed_sequence(master: int, *key: int) -> np.random.SeedSequence:
    """Stream for one trial, a pure function of the master seed and the trial's key."""
    return np.random.SeedSequence(entropy=master, spawn_key=tuple(int(k) for k in key))


@dataclass
class _Streams:
    data: np.random.Generator
    hardware: np.random.Generator
    baseline: np.random.Generator
    ais: np.random.Generator

    @classmethod
    def from_sequence(cls, ss: np.random.SeedSequence) -> "_Streams":
        return cls(*(np.random.default_rng(s) for s in ss.spawn(4)))


# --- one trial -----------------------------------------------------------------

@dataclass
class TrialRecord:
    rows: list[dict]
    conductance: list[dict]
    dataset: DataSet
    array: SynapseArray
    baseline_w: np.ndarray | None
    ledger: EnergyLedger


def _initial_array(config: ExperimentConfig, device: DeviceParams, rng, ledger) -> SynapseArray:
    return initialize(N_VISIBLE, config.n_hidden, device, rng, s_norm_override=config.s_norm_override,
                      ledger=ledger, matched=config.init == "zero")


def run_trial(config: ExperimentConfig, n_patterns: int, epochs: int, ss: np.random.SeedSequence,
              device: DeviceParams | None = None, with_ais: bool = True) -> TrialRecord:
    """Train one network (and the baseline) for ``epochs`` epochs, measuring after every epoch.

    Row ``e`` holds the state after ``e`` epochs of training and the energy
    spent in epoch ``e``; row 0 is the untrained network and carries the
    initialization RESET energy.
    """
    device = config.device if device is None else device
    tc = config.train
    st = _Streams.from_sequence(ss)
    ds = make_training_set(n_patterns, st.data, mode=config.dataset_mode)
    ledger = EnergyLedger()
    array = _initial_array(config, device, st.hardware, ledger)
    ledger.close_epoch()
    w = array.weights().copy() if config.baseline else None
    eta = tc.baseline_learning_rate or default_baseline_learning_rate(array)

    rows, cond = [], []
    for epoch in range(epochs + 1):
        if epoch > 0:
            train_epoch_hardware(array, ds, tc.k, st.hardware, ledger=ledger, statistics=tc.statistics)
            if w is not None:
                w = train_epoch_baseline(w, ds, tc.k, eta, st.baseline, statistics=tc.statistics)
        model = RbmModel(array).snapshot()
        use_ais = with_ais and config.ais_every > 0 and epoch % config.ais_every == 0
        energy = ledger.history[epoch]
        row = {
            "epoch": epoch,
            "kl_exact_nats": kl_divergence(ds.empirical, exact_distribution(model)),
            "kl_ais_nats": ais_kl_divergence(ds.empirical, model, config.ais, st.ais) if use_ais else math.nan,
            "err_rate": recovery_error_rate(model, ds.patterns),
            "prog_energy_j": energy.programming_j,
            "read_energy_j": energy.read_j,
            "success_rate": recovery_success_rate(model, ds.patterns),
            "mean_w": float(model.w.mean()),
            "min_w": float(model.w.min()),
            "max_w": float(model.w.max()),
        }
        if w is not None:
            row["baseline_kl_exact_nats"] = kl_divergence(ds.empirical, exact_distribution(w))
            row["baseline_err_rate"] = recovery_error_rate(w, ds.patterns)
        rows.append(row)
        if config.record_conductance:
            gp, gm = np.asarray(array.plus.g), np.asarray(array.minus.g)
            for i in range(array.n_visible):
                for j in range(array.n_hidden):
                    cond.append({"epoch": epoch, "i": i, "j": j, "g_plus_s": float(gp[i, j]),
                                 "g_minus_s": float(gm[i, j]), "w": float(model.w[i, j])})
    return TrialRecord(rows, cond, ds, array, w, ledger)


# --- aggregation and output ----------------------------------------------------

@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: list[list[dict]]
    aggregate: list[dict]
    out_dir: Path | None = None
    extra: dict = field(default_factory=dict)

    def column(self, name: str, trial: int | None = None) -> np.ndarray:
        """Metric column of one trial, or of the aggregate (``<name>_mean``) when ``trial`` is None."""
        if trial is None:
            return np.array([r[f"{name}_mean"] for r in self.aggregate])
        return np.array([r[name] for r in self.trials[trial]])


def _std(values) -> float:
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def aggregate(trials: list[list[dict]], keys: tuple[str, ...]) -> list[dict]:
    """Mean and sample std across trials of every non-key column, grouped by ``keys``.

    Groups keep the order in which they first appear in trial 0.
    """
    groups: dict[tuple, list[dict]] = {}
    for rows in trials:
        for r in rows:
            groups.setdefault(tuple(r[k] for k in keys), []).append(r)
    out = []
    for key, rs in groups.items():
        row = dict(zip(keys, key))
        row["n_trials"] = len(rs)
        for col in rs[0]:
            if col in keys:
                continue
            vals = [float(r[col]) for r in rs]
            row[f"{col}_mean"] = float(np.mean(vals))
            row[f"{col}_std"] = _std(vals)
        out.append(row)
    return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, rows: list[dict]) -> None:
    """Deterministic CSV: header from the first row, floats in shortest round-trip form."""
    buf = io.StringIO()
    if rows:
        cols = list(rows[0])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])
    path.write_bytes(buf.getvalue().encode())


def read_csv(path) -> list[dict]:
    """Read a CSV written by :func:`write_csv`; numeric fields come back as int or float."""
    def parse(s):
        try:
            return int(s)
        except ValueError:
            try:
                return float(s)
            except ValueError:
                return s

    with open(path, newline="") as f:
        return [{k: parse(v) for k, v in r.items()} for r in csv.DictReader(f)]


def resolve_out_dir(config: ExperimentConfig, out=None) -> Path | None:
    out = out if out is not None else config.out
    if out is None:
        out = os.environ.get("PCM_RBM_OUT")
    return Path(out) if out else None


def _write_outputs(result: ExperimentResult, conductance: list[list[dict]] | None = None,
                   arrays: list[SynapseArray] | None = None) -> None:
    d = result.out_dir
    if d is None:
        return
    d.mkdir(parents=True, exist_ok=True)
    (d / "config.json").write_text(result.config.to_json())
    for i, rows in enumerate(result.trials):
        write_csv(d / f"trial_{i}.csv", rows)
    write_csv(d / "aggregate.csv", result.aggregate)
    for i, rows in enumerate(conductance or []):
        if rows:
            write_csv(d / f"conductance_{i}.csv", rows)
    for i, arr in enumerate(arrays or []):
        (d / f"array_{i}.json").write_text(arr.to_json() + "\n")


def _require(config: ExperimentConfig, kind: str) -> None:
    if config.kind != kind:
        raise ConfigError(f"config kind is {config.kind!r}, expected {kind!r}")


# --- drivers -------------------------------------------------------------------

def run_training_experiment(config: ExperimentConfig, out=None) -> ExperimentResult:
    """Per-epoch metrics of ``config.trials`` independent training runs, plus their aggregate.

    Output files: ``trial_<i>.csv``, ``aggregate.csv``, ``config.json``,
    ``conductance_<i>.csv`` (when recorded) and ``array_<i>.json``, the final
    synapse array of each trial.
    """
    _require(config, "train")
    counts = config.pattern_counts()
    if len(counts) != 1:
        raise ConfigError("train takes a single n_patterns value")
    records = [run_trial(config, counts[0], config.train.epochs, trial_seed_sequence(config.seed, t))
               for t in range(config.trials)]
    trials = [r.rows for r in records]
    result = ExperimentResult(config, trials, aggregate(trials, ("epoch",)), resolve_out_dir(config, out))
    result.extra["records"] = records
    _write_outputs(result, [r.conductance for r in records], [r.array for r in records])
    return result


def run_pattern_sweep(config: ExperimentConfig, out=None) -> ExperimentResult:
    """Error rate of the 2-PCM network and the baseline vs number of stored patterns.

    Each (n_patterns, trial) cell trains for ``max(checkpoints)`` epochs.
    Trial files hold every epoch; the aggregate keeps epoch 0 and the
    checkpoints.
    """
    _require(config, "sweep-patterns")
    epochs = max(config.checkpoints)
    keep = {0, *config.checkpoints}
    trials = []
    for t in range(config.trials):
        rows = []
        for n in config.pattern_counts():
            rec = run_trial(config, n, epochs, trial_seed_sequence(config.seed, n, t), with_ais=False)
            for r in rec.rows:
                rows.append({"n_patterns": n, "epoch": r["epoch"], "synapse": "2-pcm",
                             "err_rate": r["err_rate"], "success_rate": r["success_rate"],
                             "kl_exact_nats": r["kl_exact_nats"]})
            if config.baseline:
                for r in rec.rows:
                    rows.append({"n_patterns": n, "epoch": r["epoch"], "synapse": "64-bit",
                                 "err_rate": r["baseline_err_rate"], "success_rate": math.nan,
                                 "kl_exact_nats": r["baseline_kl_exact_nats"]})
        trials.append(rows)
    agg = [r for r in aggregate(trials, ("n_patterns", "synapse", "epoch")) if r["epoch"] in keep]
    result = ExperimentResult(config, trials, agg, resolve_out_dir(config, out))
    _write_outputs(result)
    return result


def run_device_sweep(config: ExperimentConfig, out=None) -> ExperimentResult:
    """Final KL and error rate over the full sigma_c2c x n_levels grid.

    Every grid cell reuses the same per-trial streams, so cells differ only
    through the device parameters.
    """
    _require(config, "sweep-device")
    counts = config.pattern_counts()
    if len(counts) != 1:
        raise ConfigError("sweep-device takes a single n_patterns value")
    epochs = config.train.epochs
    trials = []
    for t in range(config.trials):
        rows = []
        for s in config.sigma_c2c_grid:
            for n_levels in config.n_levels_grid:
                try:
                    device = replace(config.device, sigma_c2c=float(s), n_levels=int(n_levels))
                except ValueError as e:
                    raise ConfigError(str(e)) from None
                rec = run_trial(config, counts[0], epochs, trial_seed_sequence(config.seed, t), device=device,
                                with_ais=False)
                last = rec.rows[-1]
                rows.append({"sigma_c2c": float(s), "n_levels": int(n_levels), "epoch": epochs,
                             "kl_exact_nats": last["kl_exact_nats"], "err_rate": last["err_rate"],
                             "success_rate": last["success_rate"]})
        trials.append(rows)
    result = ExperimentResult(config, trials, aggregate(trials, ("sigma_c2c", "n_levels", "epoch")),
                              resolve_out_dir(config, out))
    _write_outputs(result)
    return result


def run_energy_report(config: ExperimentConfig, out=None) -> dict:
    """Analytical comparison for the configured preset, with the simulated PCM energy alongside.

    The simulated figures are per-epoch means over all trials and training
    epochs (initialization excluded).  Writes ``report.json``,
    ``report.txt`` and ``config.json`` when an output directory is set.
    """
    _require(config, "energy-report")
    counts = config.pattern_counts()
    if len(counts) != 1:
        raise ConfigError("energy-report takes a single n_patterns value")
    prog, read = [], []
    for t in range(config.trials):
        cfg = replace(config, record_conductance=False, baseline=False)
        rec = run_trial(cfg, counts[0], config.train.epochs, trial_seed_sequence(config.seed, t), with_ais=False)
        for r in simulated_epoch_report(rec.ledger):
            prog.append(r["programming_j"])
            read.append(r["read_j"])
    report = {"analytical": comparison_report(config.energy_preset)}
    if prog:
        sim = (float(np.mean(prog)), float(np.mean(read)))
        report["simulated"] = comparison_report(config.energy_preset, simulated=sim)
        report["simulated_epoch"] = {"programming_j": sim[0], "read_j": sim[1], "total_j": sim[0] + sim[1],
                                     "epochs": config.train.epochs, "trials": config.trials}
    d = resolve_out_dir(config, out)
    if d is not None:
        d.mkdir(parents=True, exist_ok=True)
        (d / "config.json").write_text(config.to_json())
        (d / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        (d / "report.txt").write_text(format_energy_report(report) + "\n")
    return report


def format_energy_report(report: dict) -> str:
    parts = ["[analytical]", format_report(report["analytical"])]
    if "simulated" in report:
        s = report["simulated_epoch"]
        parts += ["", f"[simulated, {s['trials']} trial(s) x {s['epochs']} epochs]",
                  f"  pcm programming      {s['programming_j'] * 1e9:10.3f} nJ",
                  f"  pcm read             {s['read_j'] * 1e9:10.3f} nJ",
                  format_report(report["simulated"])]
    return "\n".join(parts)


RUNNERS = {
    "train": run_training_experiment,
    "sweep-patterns": run_pattern_sweep,
    "sweep-device": run_device_sweep,
    "energy-report": run_energy_report,
}


def run(config: ExperimentConfig, out=None):
    return RUNNERS[config.kind](config, out=out)
