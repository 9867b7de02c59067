#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

"""
``slat`` command line tool.

::

  slat generate --preset mini --seed 0 --out_dir data/
  slat train --train data/train_FD3.csv --seed 0 --checkpoint fd3.ckpt
  slat evaluate --checkpoint fd3.ckpt --test data/test_FD3.csv --out report.json
  slat predict --checkpoint fd3.ckpt --window last_rows.csv
  slat export-rtf --checkpoint fd3.ckpt --data data/test_FD3.csv --unit 7 --out rtf.csv
  slat multi-run --train data/train_FD3.csv --test data/test_FD3.csv --seed 0 --runs 25

Model and training flags mirror the fields of ``SlatConfig`` and
``TrainConfig``; unset flags keep the defaults. Results go to stdout as
JSON. Errors go to stderr as one JSON object ``{"error", "message"}``;
the exit code is 2 for invalid configuration or arguments and 1 for
every other failure.
"""

import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Dict

from slat import metrics
from slat.data import (
    ScalerParams,
    apply_minmax,
    load_dataset,
    read_window_csv,
    stat_features,
)
from slat.errors import ConfigError, ContractError, SlatError
from slat.model import SlatConfig, load_checkpoint, save_checkpoint
from slat.sim import generate_dataset, load_spec, preset
from slat.train import (
    MetricsReport,
    RunResult,
    TrainConfig,
    ci_scoring,
    evaluate_units,
    export_rtf,
    fit,
    multi_run,
    rmse,
)
from slat.utils.logging import LOG_FORMAT, get_logger


log = get_logger()

# (flag, type, help) per SlatConfig field
MODEL_FLAGS = [
    ("d_model", int, "embedding width"),
    ("encoder_blocks", int, "blocks per encoder path"),
    ("decoder_blocks", int, "decoder blocks"),
    ("heads", int, "attention heads"),
    ("ffn_hidden", int, "hidden width of the feed-forward nets"),
    ("window", int, "sliding window length"),
    ("decoder_steps", int, "most recent window rows fed to the decoder"),
    ("band_half_width", int, "band half width of the time path"),
    ("global_nodes", int, "global positions of the time path"),
    ("sensor_band_half_width", int, "band half width of the sensor path"),
    ("sensor_global_nodes", int, "global positions of the sensor path"),
    ("head_hidden", int, "hidden width of the regression head"),
    ("rul_max", float, "cap of the RUL labels"),
    ("max_d_model", int, "ceiling on d_model"),
    ("ln_eps", float, "layer norm epsilon"),
]

# (flag, type, help) per TrainConfig field, seed excluded
TRAIN_FLAGS = [
    ("epochs", int, "maximum number of epochs"),
    ("warmup_steps", int, "warm-up steps of the learning rate schedule"),
    ("lr_factor", float, "multiplier of the learning rate schedule"),
    ("beta1", float, "Adam beta1"),
    ("beta2", float, "Adam beta2"),
    ("eps", float, "Adam epsilon"),
    ("batch_size", int, "minibatch size"),
    ("patience", int, "epochs without improvement before stopping"),
    ("validation_fraction", float, "share of training units held out"),
]


def _add_model_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("model")
    for name, type_, help_ in MODEL_FLAGS:
        group.add_argument(f"--{name}", type=type_, default=None, help=help_)
    group.add_argument(
        "--sparse_decoder",
        action="store_true",
        default=None,
        help="apply the band/global pattern to decoder self-attention",
    )
    group.add_argument(
        "--per_head_scaling",
        action="store_true",
        default=None,
        help="scale scores by sqrt(head_dim) instead of sqrt(d_model)",
    )
    group.add_argument(
        "--no_scale_output",
        dest="scale_output",
        action="store_false",
        default=None,
        help="the head predicts RUL directly instead of RUL / rul_max",
    )


def _add_train_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("training")
    for name, type_, help_ in TRAIN_FLAGS:
        group.add_argument(f"--{name}", type=type_, default=None, help=help_)
    group.add_argument("--seed", type=int, required=True, help="master seed")


def _given(args: argparse.Namespace, names) -> Dict[str, Any]:
    return {n: getattr(args, n) for n in names if getattr(args, n) is not None}


def model_config(args: argparse.Namespace) -> SlatConfig:
    names = [f[0] for f in MODEL_FLAGS] + ["sparse_decoder", "per_head_scaling", "scale_output"]
    return SlatConfig(**_given(args, names))


def train_config(args: argparse.Namespace) -> TrainConfig:
    names = [f[0] for f in TRAIN_FLAGS] + ["seed"]
    if getattr(args, "runs", None) is not None:
        names.append("runs")
    return TrainConfig(**_given(args, names))


def _emit(result: Dict[str, Any]):
    print(json.dumps(result, indent=2, sort_keys=True))


def _load_units(path: str):
    series, _ = load_dataset(path)
    if not series:
        raise ContractError(f"{path} holds no units")
    return series


def _load_model(path: str):
    model, metadata = load_checkpoint(path)
    if "scaler" not in metadata:
        raise ContractError(f"{path} was saved without scaler parameters")
    return model, ScalerParams.from_dict(metadata["scaler"]), metadata


def cmd_generate(args: argparse.Namespace) -> Dict[str, Any]:
    if args.spec:
        spec = load_spec(args.spec)
    else:
        spec = preset(args.preset)
    if args.subsets:
        try:
            spec = spec.select(args.subsets.split(","))
        except KeyError as e:
            raise ConfigError(f"unknown sub-dataset {e}")
    splits = generate_dataset(spec, args.seed, out_dir=args.out_dir, workers=args.workers)
    return {
        name: {
            "train_units": len(train),
            "test_units": len(test),
            "train_rows": sum(s.length for s in train),
            "test_rows": sum(s.length for s in test),
        }
        for name, (train, test) in splits.items()
    }


def cmd_train(args: argparse.Namespace) -> Dict[str, Any]:
    model_cfg = model_config(args)
    cfg = train_config(args)
    result = fit(_load_units(args.train), model_cfg, cfg)
    metadata = {
        "scaler": result.scaler.to_dict(),
        "train_config": cfg.to_dict(),
        "history": result.history.to_dict(),
        "train_time_s": result.train_time_s,
        "dataset": os.path.basename(args.train),
    }
    save_checkpoint(args.checkpoint, result.model, metadata)
    if args.history:
        with open(args.history, "w") as f:
            json.dump(result.history.to_dict(), f, indent=2)
    return {
        "checkpoint": args.checkpoint,
        "epochs": len(result.history),
        "best_epoch": result.history.best_epoch,
        "best_rmse": result.history.best_rmse,
        "stopped_early": result.history.stopped_early,
        "train_time_s": result.train_time_s,
    }


def cmd_evaluate(args: argparse.Namespace) -> Dict[str, Any]:
    model, scaler, metadata = _load_model(args.checkpoint)
    test_series = _load_units(args.test)

    start = time.perf_counter()
    predictions, labels = evaluate_units(model, test_series, scaler)
    test_time_s = metrics.get_elapsed_time_ms(start) / 1000.0

    train_cfg = metadata.get("train_config", {})
    run = RunResult(
        0,
        train_cfg.get("seed", 0),
        rmse(predictions, labels),
        ci_scoring(predictions, labels, model.cfg.rul_max),
        metadata.get("train_time_s", 0.0),
        test_time_s,
        metadata.get("history", {}).get("best_epoch", 0),
    )
    report = MetricsReport(
        [run],
        name=os.path.basename(args.test),
        slat_config=model.cfg.to_dict(),
        train_config=train_cfg,
    )
    if args.out:
        report.save(args.out)
    return report.to_dict()


def cmd_predict(args: argparse.Namespace) -> Dict[str, Any]:
    model, scaler, _ = _load_model(args.checkpoint)
    cfg = model.cfg
    rows = read_window_csv(args.window, model.d_k)
    if rows.shape[0] < cfg.window:
        raise ContractError(
            f"{args.window} has {rows.shape[0]} rows, the model needs {cfg.window}"
        )
    window = apply_minmax(rows[-cfg.window :], scaler)
    encoder = stat_features(window)[None]
    decoder = window[-cfg.decoder_steps :][None]
    return {"rul": float(model.predict(encoder, decoder)[0])}


def cmd_export_rtf(args: argparse.Namespace) -> Dict[str, Any]:
    model, scaler, _ = _load_model(args.checkpoint)
    units = {s.unit_id: s for s in _load_units(args.data)}
    if args.unit not in units:
        raise ContractError(f"{args.data} has no unit {args.unit}")
    frame = export_rtf(model, units[args.unit], scaler, args.out)
    return {"out": args.out, "unit_id": args.unit, "rows": len(frame)}


def cmd_multi_run(args: argparse.Namespace) -> Dict[str, Any]:
    report = multi_run(
        _load_units(args.train),
        _load_units(args.test),
        model_config(args),
        train_config(args),
        workers=args.workers,
        name=os.path.basename(args.test),
    )
    if args.out:
        report.save(args.out)
    return report.to_dict()


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as ``ConfigError`` instead of exiting."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def parse_args(args):
    parser = ArgumentParser(
        prog="slat", description="sparse dual-path transformer for RUL prediction"
    )
    subparser = parser.add_subparsers(
        parser_class=ArgumentParser,
        title="commands",
        description="generate | train | evaluate | predict | export-rtf | multi-run",
        dest="command",
    )
    subparser.required = True

    # -----------------------------------------
    # Generate
    # -----------------------------------------
    p = subparser.add_parser("generate", help="generates synthetic run-to-failure data")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--spec", help="generator spec (YAML)")
    source.add_argument(
        "--preset", default="mini", choices=["mini", "full"], help="built-in spec"
    )
    p.add_argument("--subsets", help="comma separated sub-datasets, e.g. FD1,FD3")
    p.add_argument("--seed", type=int, required=True, help="generator seed")
    p.add_argument("--out_dir", required=True, help="directory of the CSV files")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_generate)

    # -----------------------------------------
    # Train
    # -----------------------------------------
    p = subparser.add_parser("train", help="trains a model on complete units")
    p.add_argument("--train", required=True, help="training dataset CSV")
    p.add_argument("--checkpoint", required=True, help="output checkpoint")
    p.add_argument("--history", help="optional JSON file of the per-epoch history")
    _add_model_args(p)
    _add_train_args(p)
    p.set_defaults(func=cmd_train)

    # -----------------------------------------
    # Evaluate
    # -----------------------------------------
    p = subparser.add_parser("evaluate", help="scores a checkpoint on test units")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--test", required=True, help="test dataset CSV")
    p.add_argument("--out", help="metrics report JSON")
    p.set_defaults(func=cmd_evaluate)

    # -----------------------------------------
    # Predict
    # -----------------------------------------
    p = subparser.add_parser("predict", help="predicts the RUL after the last row")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--window", required=True, help="CSV of raw rows, the last window is used")
    p.set_defaults(func=cmd_predict)

    # -----------------------------------------
    # Export RTF
    # -----------------------------------------
    p = subparser.add_parser("export-rtf", help="writes predicted vs true RUL of a unit")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="dataset CSV holding the unit")
    p.add_argument("--unit", type=int, required=True, help="unit id")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_export_rtf)

    # -----------------------------------------
    # Multi run
    # -----------------------------------------
    p = subparser.add_parser("multi-run", help="repeated train/evaluate with derived seeds")
    p.add_argument("--train", required=True, help="training dataset CSV")
    p.add_argument("--test", required=True, help="test dataset CSV")
    p.add_argument("--runs", type=int, default=None, help="number of runs")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="metrics report JSON")
    _add_model_args(p)
    _add_train_args(p)
    p.set_defaults(func=cmd_multi_run)

    return parser.parse_args(args)


def _fail(e: Exception, code: int) -> int:
    json.dump({"error": type(e).__name__, "message": str(e)}, sys.stderr)
    sys.stderr.write("\n")
    return code


def main(args=None) -> int:
    # If ``args`` not passed, defaults to ``sys.argv[1:]``
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
    command = "slat"
    try:
        args = parse_args(args)
        command = args.command
        _emit(args.func(args))
    except (ConfigError, ContractError) as e:
        log.error(f"{command} failed: {e}")
        return _fail(e, 2)
    except (SlatError, OSError, ValueError) as e:
        log.error(f"{command} failed: {e}")
        return _fail(e, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
