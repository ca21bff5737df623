"""Command-line entry point.

    pcm-rbm train --config cfg.json --override train.epochs=30 --out runs/a
    pcm-rbm sweep-patterns --trials 5 --out runs/patterns
    pcm-rbm sweep-device --override 'sigma_c2c_grid=[0,0.3]'
    pcm-rbm infer --pattern 111000111 --mask 000010000
    pcm-rbm energy-report --override energy_preset=pcm-1gb

Exit status: 0 on success, 2 for bad arguments or configuration, 1 when a
run fails.  Without ``--out`` (or ``out`` in the config) the output
directory falls back to ``$PCM_RBM_OUT``; if that is unset nothing is written.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analysis import TooManyMissing, infer_missing_pixels
from .crossbar import SynapseArray
from .datasets import pattern_from_str
from .experiments import (ConfigError, ExperimentConfig, format_energy_report, resolve_out_dir, run,
                          run_trial, trial_seed_sequence)
from .rbm import RbmModel

log = logging.getLogger("pcmrbm")

EXPERIMENT_COMMANDS = ("train", "sweep-patterns", "sweep-device", "energy-report")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config (unknown keys are rejected)")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="dotted config override, e.g. train.epochs=30 (repeatable)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--trials", type=int, help="number of trials")
    common.add_argument("--out", help="output directory (default: $PCM_RBM_OUT)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="pcm-rbm", description="RBM training on simulated 2-PCM synapses")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("train", parents=[common], help="per-epoch KL / error / energy of the 2-PCM network")
    sub.add_parser("sweep-patterns", parents=[common], help="error rate vs number of stored patterns")
    sub.add_parser("sweep-device", parents=[common], help="sigma_c2c x n_levels grid")
    sub.add_parser("energy-report", parents=[common], help="conventional vs PCM energy per epoch")
    inf = sub.add_parser("infer", parents=[common], help="posterior over masked pixels")
    inf.add_argument("--pattern", required=True, help="visible pattern as a 0/1 string, e.g. 111000111")
    inf.add_argument("--mask", required=True, help="0/1 string, 1 marks a missing pixel")
    inf.add_argument("--model", type=Path,
                     help="array_<i>.json from a train run; default trains trial 0 of the config")
    return p


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config is not None else ExperimentConfig()
    kind = args.command if args.command in EXPERIMENT_COMMANDS else "train"
    d = cfg.to_dict()
    d["kind"] = kind
    cfg = ExperimentConfig.from_dict(d).with_overrides(args.override)
    top = {}
    if args.seed is not None:
        top["seed"] = args.seed
    if args.trials is not None:
        top["trials"] = args.trials
    if args.out is not None:
        top["out"] = args.out
    if top:
        d = cfg.to_dict()
        d.update(top)
        cfg = ExperimentConfig.from_dict(d)
    return cfg


def _load_model(path: Path) -> RbmModel:
    try:
        d = json.loads(path.read_text())
    except OSError as e:
        raise UsageError(f"cannot read model file {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"model file {path} is not valid JSON: {e}") from None
    try:
        return RbmModel(SynapseArray.from_snapshot(d)) if isinstance(d, dict) else RbmModel(np.array(d, dtype=float))
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"model file {path} is not an array snapshot or weight matrix: {e}") from None


def cmd_infer(args, cfg: ExperimentConfig) -> int:
    try:
        pattern = pattern_from_str(args.pattern)
        mask = pattern_from_str(args.mask)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.model is not None:
        model = _load_model(args.model)
    else:
        cfg1 = replace(cfg, record_conductance=False, baseline=False)
        n = cfg.pattern_counts()[0]
        rec = run_trial(cfg1, n, cfg.train.epochs, trial_seed_sequence(cfg.seed, 0), with_ais=False)
        model = RbmModel(rec.array)
    try:
        result = infer_missing_pixels(model.snapshot(), pattern, mask)
    except (ValueError, TooManyMissing) as e:
        raise UsageError(str(e)) from None
    text = result.to_json(indent=2)
    print(text)
    out = resolve_out_dir(cfg)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(cfg.to_json())
        (out / "inference.json").write_text(text + "\n")
    return 0


def cmd_experiment(cfg: ExperimentConfig) -> int:
    result = run(cfg)
    if cfg.kind == "energy-report":
        print(format_energy_report(result))
        print(json.dumps(result, indent=2, sort_keys=True))
        return 0
    out = result.out_dir
    log.info("%s: %d trial(s), %d aggregate rows", cfg.kind, len(result.trials), len(result.aggregate))
    if out is not None:
        print(f"wrote {out}")
    else:
        # nothing written: show the aggregate table on stdout
        cols = list(result.aggregate[0])
        print(",".join(cols))
        for r in result.aggregate:
            print(",".join(f"{r[c]:.6g}" if isinstance(r[c], float) else str(r[c]) for c in cols))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        if args.command == "infer":
            return cmd_infer(args, cfg)
        return cmd_experiment(cfg)
    except (ConfigError, UsageError) as e:
        print(f"pcm-rbm: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # runtime failure
        log.debug("run failed", exc_info=True)
        print(f"pcm-rbm: run failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
