#!/usr/bin/env python3

# Copyright (c) Facebook, Inc. and its affiliates.
# All rights reserved.
#
# This source code is licensed under the BSD-style license found in the
# LICENSE file in the root directory of this source tree.

import math
import time
from typing import Any, Dict, List, Optional, Sequence

from slat import events, metrics
from slat.autograd import Tape, Tensor, backward, ops
from slat.data import (
    RunToFailureSeries,
    ScalerParams,
    ShuffledBatchSampler,
    WindowSample,
    build_samples,
    fit_minmax,
    holdout_split,
    stack_samples,
)
from slat.errors import ConfigError, ContractError, DivergenceError
from slat.model import SlatConfig, SlatModel, init_parameters
from slat.train.evaluate import rmse
from slat.train.optim import Adam, NoamOpt
from slat.utils.logging import get_logger


log = get_logger()


class TrainConfig:
    """
    Optimization settings. Defaults: 300 epochs, 4000 warm-up steps,
    Adam with ``betas=(0.9, 0.98)`` and ``eps=1e-9``, batches of 64,
    early stopping after 20 epochs without improvement on 10% held-out
    units, 25 runs.

    Arguments:
        lr_factor: multiplier of the warm-up schedule
        validation_fraction: share of training units held out for early
            stopping (0 monitors the training RMSE instead)
        seed: seeds initialization, batch order and the validation split
    """

    __slots__ = [
        "epochs",
        "warmup_steps",
        "lr_factor",
        "beta1",
        "beta2",
        "eps",
        "batch_size",
        "patience",
        "validation_fraction",
        "runs",
        "seed",
    ]

    def __init__(
        self,
        epochs: int = 300,
        warmup_steps: int = 4000,
        lr_factor: float = 1.0,
        beta1: float = 0.9,
        beta2: float = 0.98,
        eps: float = 1e-9,
        batch_size: int = 64,
        patience: int = 20,
        validation_fraction: float = 0.1,
        runs: int = 25,
        seed: int = 0,
    ):
        self.epochs = int(epochs)
        self.warmup_steps = int(warmup_steps)
        self.lr_factor = float(lr_factor)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.batch_size = int(batch_size)
        self.patience = int(patience)
        self.validation_fraction = float(validation_fraction)
        self.runs = int(runs)
        self.seed = int(seed)
        self._validate()

    def _validate(self):
        for name in ("epochs", "warmup_steps", "batch_size", "patience", "runs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ConfigError(f"betas must lie in (0, 1), got {self.beta1}, {self.beta2}")
        if self.eps <= 0 or self.lr_factor <= 0:
            raise ConfigError("eps and lr_factor must be positive")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError("validation_fraction must lie in [0, 1)")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")

    def to_dict(self) -> Dict[str, Any]:
        return {s: getattr(self, s) for s in self.__slots__}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "TrainConfig":
        unknown = set(d) - set(cls.__slots__)
        if unknown:
            raise ConfigError(f"unknown TrainConfig fields: {sorted(unknown)}")
        return cls(**d)

    def __eq__(self, other):
        return isinstance(other, TrainConfig) and self.to_dict() == other.to_dict()


class History:
    """
    One record per finished epoch: ``epoch``, ``train_rmse``,
    ``val_rmse`` (``None`` without validation data) and the ``lr`` of the
    epoch's last step.
    """

    def __init__(self):
        self.epochs: List[Dict[str, Any]] = []
        self.best_epoch: int = 0
        self.best_rmse: float = math.inf
        self.stopped_early: bool = False

    def append(self, epoch: int, train_rmse: float, val_rmse: Optional[float], lr: float):
        self.epochs.append(
            {"epoch": epoch, "train_rmse": train_rmse, "val_rmse": val_rmse, "lr": lr}
        )

    def column(self, key: str) -> List[Any]:
        return [e[key] for e in self.epochs]

    def __len__(self) -> int:
        return len(self.epochs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epochs": list(self.epochs),
            "best_epoch": self.best_epoch,
            "best_rmse": self.best_rmse,
            "stopped_early": self.stopped_early,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "History":
        h = cls()
        h.epochs = list(d["epochs"])
        h.best_epoch = d["best_epoch"]
        h.best_rmse = d["best_rmse"]
        h.stopped_early = d["stopped_early"]
        return h

    def __eq__(self, other):
        return isinstance(other, History) and self.to_dict() == other.to_dict()


@metrics.prof
def train(
    model: SlatModel,
    samples: Sequence[WindowSample],
    cfg: TrainConfig,
    val_samples: Optional[Sequence[WindowSample]] = None,
) -> History:
    """
    Minimizes the per-batch RMSE with Adam under the warm-up schedule.

    After every epoch the model is scored on ``val_samples`` (or on the
    training samples when there are none). Training stops after
    ``cfg.patience`` epochs without improvement and the weights of the
    best epoch are restored.

    Raises:
        DivergenceError: the loss became NaN or infinite
    """
    if not samples:
        raise ContractError("train needs at least one sample")
    enc, dec, labels = stack_samples(samples)
    val = stack_samples(val_samples) if val_samples else None

    sampler = ShuffledBatchSampler(len(samples), cfg.batch_size, seed=cfg.seed)
    opt = NoamOpt(
        Adam(model.parameters(), betas=(cfg.beta1, cfg.beta2), eps=cfg.eps),
        model.cfg.d_model,
        cfg.warmup_steps,
        cfg.lr_factor,
    )
    history = History()
    best_state = model.state_dict()
    stale = 0

    events.record(
        "train.start",
        metadata={
            "samples": len(samples),
            "val_samples": len(val_samples) if val_samples else 0,
            "parameters": model.num_parameters(),
            "epochs": cfg.epochs,
        },
    )
    for epoch in range(1, cfg.epochs + 1):
        sampler.set_epoch(epoch)
        for batch in sampler:
            opt.zero_grad()
            with Tape() as tape:
                pred = model(Tensor(enc[batch]), Tensor(dec[batch]))
                loss = ops.rmse_loss(pred, labels[batch])
            value = loss.item()
            if not math.isfinite(value):
                lr = opt.rate(opt._step + 1)
                events.record(
                    "train.diverged",
                    metadata={"epoch": epoch, "step": opt._step + 1, "loss": value},
                )
                raise DivergenceError(epoch, opt._step + 1, value, lr)
            backward(loss, tape)
            opt.step()

        train_rmse = rmse(model.predict(enc, dec), labels)
        val_rmse = rmse(model.predict(val[0], val[1]), val[2]) if val else None
        history.append(epoch, train_rmse, val_rmse, opt.last_lr)
        metrics.put_metric("train.rmse", train_rmse)
        if val_rmse is not None:
            metrics.put_metric("val.rmse", val_rmse)
        metrics.put_metric("lr", opt.last_lr)
        events.record(
            "train.epoch",
            metadata={
                "epoch": epoch,
                "train_rmse": train_rmse,
                "val_rmse": val_rmse,
                "lr": opt.last_lr,
            },
        )

        monitored = val_rmse if val_rmse is not None else train_rmse
        if not math.isfinite(monitored):
            events.record("train.diverged", metadata={"epoch": epoch, "rmse": monitored})
            raise DivergenceError(epoch, opt._step, monitored, opt.last_lr)
        if monitored < history.best_rmse:
            history.best_rmse = monitored
            history.best_epoch = epoch
            best_state = model.state_dict()
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                history.stopped_early = True
                log.info(
                    f"early stop at epoch {epoch}, best epoch {history.best_epoch}"
                    f" (rmse={history.best_rmse:.4f})"
                )
                events.record(
                    "train.early_stop",
                    metadata={"epoch": epoch, "best_epoch": history.best_epoch},
                )
                break

    model.load_state_dict(best_state)
    return history


class TrainResult:
    __slots__ = ["model", "scaler", "history", "train_time_s"]

    def __init__(
        self,
        model: SlatModel,
        scaler: ScalerParams,
        history: History,
        train_time_s: float,
    ):
        self.model = model
        self.scaler = scaler
        self.history = history
        self.train_time_s = train_time_s


def fit(
    train_series: Sequence[RunToFailureSeries],
    model_cfg: SlatConfig,
    cfg: TrainConfig,
) -> TrainResult:
    """
    End to end training on complete units: holds out validation units,
    fits the scaler on the remaining ones, builds samples, initializes
    the model from ``cfg.seed`` and trains it.
    """
    if not train_series:
        raise ContractError("fit needs at least one training unit")
    start = time.perf_counter()
    if cfg.validation_fraction > 0 and len(train_series) >= 2:
        fit_units, val_units = holdout_split(
            train_series, cfg.validation_fraction, cfg.seed
        )
    else:
        fit_units, val_units = list(train_series), []

    scaler = fit_minmax(fit_units)
    samples = build_samples(fit_units, scaler, model_cfg)
    val_samples = build_samples(val_units, scaler, model_cfg) if val_units else []
    if not samples:
        raise ContractError(
            f"no training unit is as long as the window ({model_cfg.window})"
        )
    model = init_parameters(model_cfg, fit_units[0].num_channels, cfg.seed)
    log.info(
        f"training on {len(samples)} windows of {len(fit_units)} units,"
        f" validating on {len(val_samples)} windows of {len(val_units)} units"
    )
    history = train(model, samples, cfg, val_samples or None)
    return TrainResult(
        model, scaler, history, metrics.get_elapsed_time_ms(start) / 1000.0
    )
